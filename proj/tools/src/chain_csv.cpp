#include "chain_csv.h"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "lambda_infer/errors.h"

namespace lambda_infer::cli {

namespace {

auto split(const std::string& line, char sep) -> std::vector<std::string> {
  auto out = std::vector<std::string>{};
  auto in = std::istringstream{line};
  auto cell = std::string{};
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

auto strip(std::string s) -> std::string {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  auto b = s.find_first_not_of(' ');
  return b == std::string::npos ? std::string{} : s.substr(b);
}

}  // namespace

auto write_chain_csv(std::ostream& out, const Prior_spec& spec, const Chain_output& chain,
                     const std::vector<std::string>& comments, bool timing) -> void {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "step";
  for (const auto& name : parameter_names(spec)) out << ',' << name;
  auto moments = chain.records.empty() ? std::size_t{0} : chain.records.front().moments.size();
  for (std::size_t i = 0; i < moments; ++i) out << ",lambda" << i + 3;
  out << ",log_estimate,accepted,stage1_accepted,wall_ms\n";
  out << std::setprecision(12);
  for (const auto& r : chain.records) {
    out << r.step;
    for (auto x : r.params) out << ',' << x;
    for (auto x : r.moments) out << ',' << x;
    out << ',' << r.log_estimate << ',' << (r.accepted ? 1 : 0) << ','
        << (r.stage1_accepted ? 1 : 0) << ',' << std::fixed << std::setprecision(3)
        << (timing ? r.wall_ms : 0.0) << std::defaultfloat << std::setprecision(12) << '\n';
  }
}

auto read_csv_columns(std::istream& in) -> std::map<std::string, std::vector<double>> {
  auto line = std::string{};
  auto line_no = 0;
  auto names = std::vector<std::string>{};
  auto columns = std::map<std::string, std::vector<double>>{};
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (names.empty()) {
      for (auto& c : cells) names.push_back(strip(c));
      for (const auto& n : names) columns[n];
      continue;
    }
    if (cells.size() != names.size()) {
      throw Data_error{"line " + std::to_string(line_no) + ": expected " +
                       std::to_string(names.size()) + " cells, found " +
                       std::to_string(cells.size())};
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto text = strip(cells[i]);
      try {
        auto used = std::size_t{0};
        auto v = std::stod(text, &used);
        if (used != text.size()) throw Data_error{""};
        columns[names[i]].push_back(v);
      } catch (const std::exception&) {
        throw Data_error{"line " + std::to_string(line_no) + ": cannot parse '" + text +
                         "' in column " + names[i]};
      }
    }
  }
  if (names.empty()) throw Data_error{"CSV has no header row"};
  return columns;
}

auto read_csv_columns(const std::string& path) -> std::map<std::string, std::vector<double>> {
  auto in = std::ifstream{path};
  if (!in) throw Data_error{"cannot open '" + path + "'"};
  return read_csv_columns(in);
}

}  // namespace lambda_infer::cli
