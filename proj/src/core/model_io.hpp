#pragma once

// Line-oriented text format for networks of hybrid automata:
//
//   automaton robot1
//   var x1
//   var z shared
//   loc wait { flow x1'=1; inv x1 <= 1; }
//   jump wait -> adapt { guard x1 >= 1 && z = 1; reset x1 := 1.1*x1 + 0; label flash_2; urgent; }
//   init wait { x1 = 0; }
//
// '#' starts a comment. Bad sets use `bad <location|*> { <constraints>; }`.

#include "model.hpp"
#include "reach.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hyreach {

class ParseError : public ModelError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

Network parse_model(std::string_view text);
std::string write_model(const Network& network);
std::string write_model(const HybridAutomaton& automaton);

/// Concatenates the components of all files. Throws ModelError / ParseError.
Network read_model_files(const std::vector<std::filesystem::path>& paths);
/// One <automaton name>.ha file per component; returns the written paths.
std::vector<std::filesystem::path> write_model_dir(const Network& network, const std::filesystem::path& dir);

std::vector<BadSet> parse_bad_sets(std::string_view text);
std::string write_bad_sets(const std::vector<BadSet>& bad);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace hyreach
