#include "ivpoly/report.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace ivp {

const char* const kReportHeader = "name,statistic,threshold,p_value,passed,n_samples,seed,notes";

std::string format_double(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace {

std::string num(double x) { return format_double(x); }

// JSON has no literal for non-finite numbers; those travel as strings.
nlohmann::ordered_json jnum(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

double from_jnum(const nlohmann::json& j) {
  return j.is_string() ? std::stod(j.get<std::string>()) : j.get<double>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Seed parse_seed(const std::string& s) {
  const auto colon = s.find(':');
  try {
    std::size_t used = 0;
    const std::string head = s.substr(0, colon);
    Seed seed(std::stoull(head, &used));
    if (used != head.size()) throw std::invalid_argument(s);
    if (colon != std::string::npos) {
      const std::string rest = s.substr(colon + 1);
      if (rest.empty() || rest.back() == '.') throw std::invalid_argument(s);
      std::stringstream ss(rest);
      std::string part;
      while (std::getline(ss, part, '.')) {
        seed.path.push_back(std::stoull(part, &used));
        if (used != part.size()) throw std::invalid_argument(s);
      }
    }
    return seed;
  } catch (const std::logic_error&) {
    throw ParameterError("invalid seed '" + s + "'");
  }
}

std::string reports_to_csv(const std::vector<TestReport>& reports) {
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const auto& r : reports) {
    os << csv_field(r.name) << ',' << num(r.statistic) << ',' << num(r.threshold) << ','
       << (r.p_value ? num(*r.p_value) : "") << ',' << (r.passed ? "true" : "false") << ',' << r.n_samples
       << ',' << r.seed.str() << ',' << csv_field(r.notes) << '\n';
  }
  return os.str();
}

std::string reports_to_json(const std::vector<TestReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["statistic"] = jnum(r.statistic);
    j["threshold"] = jnum(r.threshold);
    j["p_value"] = r.p_value ? jnum(*r.p_value) : nlohmann::ordered_json(nullptr);
    j["passed"] = r.passed;
    j["n_samples"] = r.n_samples;
    j["seed"] = r.seed.str();
    j["notes"] = r.notes;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::vector<TestReport> reports_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].size() != 8) throw ParameterError("report CSV: missing header");
  std::vector<TestReport> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 8) throw ParameterError("report CSV: row " + std::to_string(i) + " has wrong arity");
    TestReport r;
    r.name = f[0];
    r.statistic = std::stod(f[1]);
    r.threshold = std::stod(f[2]);
    if (!f[3].empty()) r.p_value = std::stod(f[3]);
    r.passed = f[4] == "true";
    r.n_samples = std::stol(f[5]);
    r.seed = parse_seed(f[6]);
    r.notes = f[7];
    out.push_back(r);
  }
  return out;
}

std::vector<TestReport> reports_from_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  std::vector<TestReport> out;
  for (const auto& j : arr) {
    TestReport r;
    r.name = j.at("name").get<std::string>();
    r.statistic = from_jnum(j.at("statistic"));
    r.threshold = from_jnum(j.at("threshold"));
    if (!j.at("p_value").is_null()) r.p_value = from_jnum(j.at("p_value"));
    r.passed = j.at("passed").get<bool>();
    r.n_samples = j.at("n_samples").get<long>();
    r.seed = parse_seed(j.at("seed").get<std::string>());
    r.notes = j.at("notes").get<std::string>();
    out.push_back(r);
  }
  return out;
}

}  // namespace ivp
