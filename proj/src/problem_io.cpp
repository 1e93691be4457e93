// Copyright 2026 The qnum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnum/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <set>

#include "qnum/error.hpp"

namespace qnum {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

const KvEntry& Require(const KvDocument::Section& sec, const std::string& key) {
  const auto it = sec.find(key);
  if (it == sec.end()) throw ParseError(0, "missing key '" + key + "'");
  return it->second;
}

}  // namespace

KvDocument KvDocument::Parse(std::istream& in) {
  KvDocument doc;
  doc.sections_[""];
  std::string current;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string line = Trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError(line_no, "malformed section header '" + line + "'");
      }
      current = Trim(line.substr(1, line.size() - 2));
      if (doc.sections_.count(current) != 0 && !current.empty()) {
        throw ParseError(line_no, "duplicate section [" + current + "]");
      }
      doc.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    auto& sec = doc.sections_[current];
    if (sec.count(key) != 0) {
      throw ParseError(line_no, "duplicate key '" + key + "'");
    }
    sec.emplace(key, KvEntry{value, line_no});
  }
  return doc;
}

KvDocument KvDocument::ParseFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kParse, "cannot open '" + path.string() + "'");
  }
  return Parse(in);
}

const KvDocument::Section* KvDocument::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

std::vector<double> ParseReals(const std::string& text, int line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == ',')) {
      ++pos;
    }
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' &&
           text[end] != ',') {
      ++end;
    }
    out.push_back(ParseReal(text.substr(pos, end - pos), line));
    pos = end;
  }
  return out;
}

double ParseReal(const std::string& text, int line) {
  const std::string t = Trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(line, "not a finite real number: '" + t + "'");
  }
  return value;
}

long long ParseInteger(const std::string& text, int line) {
  const std::string t = Trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(line, "not an integer: '" + t + "'");
  }
  return value;
}

NumProblem ParseProblem(const KvDocument& doc) {
  const KvDocument::Section* sec = doc.section("problem");
  if (sec == nullptr) sec = doc.section("");
  if (sec == nullptr) throw ParseError(0, "no problem section");

  const KvEntry& m_entry = Require(*sec, "M");
  const KvEntry& n_entry = Require(*sec, "N");
  const long long m = ParseInteger(m_entry.value, m_entry.line);
  const long long n = ParseInteger(n_entry.value, n_entry.line);
  if (m < 1 || n < 0) throw ParseError(m_entry.line, "M must be >= 1 and N >= 0");

  std::set<std::string> known{"M", "N", "A", "b"};
  NumProblem p;
  p.utilities.reserve(static_cast<std::size_t>(m));
  for (long long i = 1; i <= m; ++i) {
    const std::string prefix = "utility." + std::to_string(i) + ".";
    const KvEntry& ea = Require(*sec, prefix + "a");
    const KvEntry& ec = Require(*sec, prefix + "c");
    QuadraticUtility q;
    q.a = ParseReal(ea.value, ea.line);
    q.c = ParseReal(ec.value, ec.line);
    if (const auto it = sec->find(prefix + "f"); it != sec->end()) {
      q.f = ParseReal(it->second.value, it->second.line);
    }
    known.insert({prefix + "a", prefix + "c", prefix + "f"});
    p.utilities.emplace_back(q);
  }

  const KvEntry& ea = Require(*sec, "A");
  const std::vector<double> a = ParseReals(ea.value, ea.line);
  if (a.size() != static_cast<std::size_t>(m * n)) {
    throw ParseError(ea.line, "A needs N*M=" + std::to_string(m * n) +
                                  " entries, got " + std::to_string(a.size()));
  }
  p.a_matrix.resize(n, m);
  for (long long r = 0; r < n; ++r) {
    for (long long c = 0; c < m; ++c) p.a_matrix(r, c) = a[r * m + c];
  }

  const KvEntry& eb = Require(*sec, "b");
  const std::vector<double> b = ParseReals(eb.value, eb.line);
  if (b.size() != static_cast<std::size_t>(n)) {
    throw ParseError(eb.line, "b needs N=" + std::to_string(n) + " entries, got " +
                                  std::to_string(b.size()));
  }
  p.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(n));

  for (const auto& [key, entry] : *sec) {
    if (known.count(key) == 0) {
      throw ParseError(entry.line, "unrecognized key '" + key + "'");
    }
  }
  return p;
}

NumProblem ParseProblem(std::istream& in) {
  return ParseProblem(KvDocument::Parse(in));
}

NumProblem LoadProblemFile(const std::filesystem::path& path) {
  return ParseProblem(KvDocument::ParseFile(path));
}

void WriteProblem(std::ostream& out, const NumProblem& problem) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "[problem]\n";
  s << "M = " << problem.num_agents() << "\n";
  s << "N = " << problem.num_constraints() << "\n";
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const auto* q = std::get_if<QuadraticUtility>(&problem.utilities[i]);
    if (q == nullptr) {
      throw Error(ErrorKind::kNotQuadratic,
                  "only quadratic utilities can be written to a problem file");
    }
    s << "utility." << i + 1 << ".a = " << q->a << "\n";
    s << "utility." << i + 1 << ".c = " << q->c << "\n";
    s << "utility." << i + 1 << ".f = " << q->f << "\n";
  }
  s << "A =";
  for (Eigen::Index r = 0; r < problem.a_matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < problem.a_matrix.cols(); ++c) {
      s << ' ' << problem.a_matrix(r, c);
    }
  }
  s << "\nb =";
  for (Eigen::Index r = 0; r < problem.b.size(); ++r) s << ' ' << problem.b(r);
  s << "\n";
  out << s.str();
}

}  // namespace qnum
