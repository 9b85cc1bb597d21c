#pragma once

#include "ivpoly/verify.hpp"

#include <string>
#include <vector>

namespace ivp {

// Column order shared by both formats.
extern const char* const kReportHeader;

std::string reports_to_csv(const std::vector<TestReport>& reports);
std::string reports_to_json(const std::vector<TestReport>& reports);

std::vector<TestReport> reports_from_csv(const std::string& text);
std::vector<TestReport> reports_from_json(const std::string& text);

// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

// Parses "root" or "root:a.b.c".
Seed parse_seed(const std::string& s);

}  // namespace ivp
