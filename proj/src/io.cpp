#include "tdm/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace tdm {

CandidateMatrix read_matrix_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, e.what());
  }
  if (!j.is_object() || !j.contains("d") || !j.contains("entries"))
    fail(Errc::ParseError, "expected object with \"d\" and \"entries\"");
  if (!j["d"].is_number_integer()) fail(Errc::ParseError, "\"d\" must be an integer");
  int d = j["d"].get<int>();
  if (d < 1) fail(Errc::BadShape, "\"d\" must be positive");
  const auto& rows = j["entries"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != d)
    fail(Errc::BadShape, "\"entries\" must hold d rows");
  CandidateMatrix m(d);
  for (int i = 0; i < d; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      fail(Errc::BadShape, "row " + std::to_string(i + 1) + " must hold d values");
    for (int k = 0; k < d; ++k) {
      const auto& cell = row[static_cast<size_t>(k)];
      if (!cell.is_number())
        fail(Errc::ParseError, "entry (" + std::to_string(i + 1) + "," + std::to_string(k + 1) +
                                   ") is not a number");
      m.at(i, k) = cell.get<double>();
    }
  }
  return m;
}

CandidateMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',')) {
      ++col;
      try {
        size_t pos = 0;
        row.push_back(std::stod(tok, &pos));
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(Errc::ParseError, "line " + std::to_string(lineno) + ", field " +
                                   std::to_string(col) + ": not a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(Errc::ParseError, "no data rows");
  int d = static_cast<int>(rows.size());
  for (int i = 0; i < d; ++i)
    if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != d)
      fail(Errc::BadShape, "line " + std::to_string(i + 1) + ": expected " + std::to_string(d) +
                               " values, got " +
                               std::to_string(rows[static_cast<size_t>(i)].size()));
  return CandidateMatrix::from_rows(rows);
}

static bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

CandidateMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ParseError, "cannot open " + path);
  return has_suffix(path, ".json") ? read_matrix_json(in) : read_matrix_csv(in);
}

ValidatedMatrix read_validated_matrix(const std::string& path, Mode mode, double tol) {
  return validate_or_throw(read_matrix_file(path), mode, tol);
}

std::string matrix_to_json(const CandidateMatrix& m) {
  nlohmann::ordered_json j;
  j["d"] = m.d;
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.d; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int k = 0; k < m.d; ++k) row.push_back(m.at(i, k));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j.dump(2);
}

std::string matrix_to_csv(const CandidateMatrix& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (int i = 0; i < m.d; ++i) {
    for (int k = 0; k < m.d; ++k) {
      if (k) os << ",";
      os << m.at(i, k);
    }
    os << "\n";
  }
  return os.str();
}

void write_matrix_file(const std::string& path, const CandidateMatrix& m) {
  std::ofstream out(path);
  if (!out) fail(Errc::ParseError, "cannot open " + path + " for writing");
  out << (has_suffix(path, ".json") ? matrix_to_json(m) : matrix_to_csv(m));
}

}  // namespace tdm
