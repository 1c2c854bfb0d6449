// cli.hpp — `qt` command-line front end

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qtrans::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 domain error, 2 usage error. `args` excludes the program name.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a:b:n" -> n evenly spaced values from a to b inclusive; a bare number -> {number}.
std::vector<double> parse_linspace(const std::string& text);
// "a:b" -> a, a+1, ..., b; a bare integer -> {integer}.
std::vector<int> parse_int_range(const std::string& text);

} // namespace qtrans::cli
