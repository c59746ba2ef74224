#include "lambda_infer/dataset_io.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

auto trim(const std::string& s) -> std::string {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

auto parse_double(const std::string& text, const std::string& what) -> double {
  auto t = trim(text);
  try {
    auto used = std::size_t{0};
    auto v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw Data_error{"cannot parse " + what + " from '" + text + "'"};
}

auto open_input(const std::string& path) -> std::ifstream {
  auto in = std::ifstream{path};
  if (!in) throw Data_error{"cannot open '" + path + "'"};
  return in;
}

}  // namespace

auto parse_dataset(std::istream& in) -> Time_series_data {
  auto data = Time_series_data{};
  auto line = std::string{};
  auto line_no = 0;
  auto haplotype_length = std::string::npos;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = std::istringstream{t};
    auto time_text = std::string{};
    auto count_text = std::string{};
    auto haplotype = std::string{};
    auto extra = std::string{};
    if (!(fields >> time_text >> count_text >> haplotype) || (fields >> extra)) {
      throw Data_error{"line " + std::to_string(line_no) +
                       ": expected `<time> <count> <haplotype>`"};
    }
    double time = 0.0;
    long count = 0;
    try {
      auto used = std::size_t{0};
      time = std::stod(time_text, &used);
      if (used != time_text.size() || !std::isfinite(time)) throw Data_error{""};
      count = std::stol(count_text, &used);
      if (used != count_text.size()) throw Data_error{""};
    } catch (const std::exception&) {
      throw Data_error{"line " + std::to_string(line_no) + ": malformed time or count"};
    }
    if (count < 1 || count > std::numeric_limits<int>::max()) {
      throw Data_error{"line " + std::to_string(line_no) + ": counts must be positive"};
    }
    if (haplotype_length == std::string::npos) haplotype_length = haplotype.size();
    if (haplotype.size() != haplotype_length) {
      throw Data_error{"line " + std::to_string(line_no) + ": haplotype length " +
                       std::to_string(haplotype.size()) + " differs from " +
                       std::to_string(haplotype_length)};
    }
    if (data.batches.empty() || time > data.batches.back().time) {
      data.batches.push_back({time, {}});
    } else if (time < data.batches.back().time) {
      throw Data_error{"line " + std::to_string(line_no) + ": times must be sorted"};
    }
    data.batches.back().counts[haplotype] += static_cast<int>(count);
  }
  if (data.batches.empty()) throw Data_error{"dataset is empty"};
  if (data.batches.front().time != 0.0) throw Data_error{"the first sampling time must be 0"};
  return data;
}

auto read_dataset(const std::string& path) -> Time_series_data {
  auto in = open_input(path);
  return parse_dataset(in);
}

auto write_dataset(std::ostream& out, const Time_series_data& data) -> void {
  for (const auto& batch : data.batches) {
    for (const auto& [label, count] : batch.counts) {
      out << batch.time << '\t' << count << '\t' << label << '\n';
    }
  }
}

auto parse_key_values(std::istream& in) -> Key_values {
  auto kv = Key_values{};
  auto line = std::string{};
  auto line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Data_error{"config line " + std::to_string(line_no) + ": expected key = value"};
    }
    auto key = trim(t.substr(0, eq));
    if (key.empty()) throw Data_error{"config line " + std::to_string(line_no) + ": empty key"};
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

auto read_key_values(const std::string& path) -> Key_values {
  auto in = open_input(path);
  return parse_key_values(in);
}

auto parse_tuples(const std::string& text, std::size_t arity) -> std::vector<std::vector<double>> {
  auto out = std::vector<std::vector<double>>{};
  auto t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw Data_error{"unbalanced brackets in '" + text + "'"};
    t = trim(t.substr(1, t.size() - 2));
  }
  auto pos = std::size_t{0};
  while (pos < t.size()) {
    auto open = t.find('(', pos);
    if (open == std::string::npos) {
      if (!trim(t.substr(pos)).empty() && trim(t.substr(pos)) != ",") {
        throw Data_error{"expected '(' in '" + text + "'"};
      }
      break;
    }
    auto close = t.find(')', open);
    if (close == std::string::npos) throw Data_error{"unbalanced parentheses in '" + text + "'"};
    auto inner = std::istringstream{t.substr(open + 1, close - open - 1)};
    auto item = std::string{};
    auto tuple = std::vector<double>{};
    while (std::getline(inner, item, ',')) tuple.push_back(parse_double(item, "tuple entry"));
    if (tuple.size() != arity) {
      throw Data_error{"expected " + std::to_string(arity) + "-tuples in '" + text + "'"};
    }
    out.push_back(std::move(tuple));
    pos = close + 1;
  }
  return out;
}

auto measure_from_key_values(const Key_values& kv) -> Lambda_measure {
  static const auto known = std::vector<std::string>{"kingman_mass", "atoms", "kernels", "betas", "eta"};
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Data_error{"unknown measure key '" + key + "'"};
    }
  }
  auto get = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    return it == kv.end() ? std::string{} : it->second;
  };
  auto kingman = get("kingman_mass").empty() ? 0.0 : parse_double(get("kingman_mass"), "kingman_mass");
  auto eta = get("eta").empty() ? k_default_eta : parse_double(get("eta"), "eta");
  auto atoms = std::vector<Atom>{};
  for (const auto& t : parse_tuples(get("atoms"), 2)) atoms.push_back({t[0], t[1]});
  auto kernels = std::vector<Normal_kernel>{};
  for (const auto& t : parse_tuples(get("kernels"), 3)) kernels.push_back({t[0], t[1], t[2]});
  auto betas = std::vector<Beta_component>{};
  for (const auto& t : parse_tuples(get("betas"), 3)) betas.push_back({t[0], t[1], t[2]});
  try {
    return Lambda_measure{kingman, std::move(atoms), std::move(kernels), std::move(betas), eta};
  } catch (const Domain_error& e) {
    throw Data_error{std::string{"invalid measure: "} + e.what()};
  }
}

auto parse_measure_spec(const std::string& spec) -> Lambda_measure {
  auto colon = spec.find(':');
  auto name = spec.substr(0, colon);
  auto arg = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw Data_error{"measure '" + name + "' needs a parameter"};
    return parse_double(arg, name + " parameter");
  };
  try {
    if (spec == "kingman") return Lambda_measure::kingman();
    if (spec == "star") return Lambda_measure::star();
    if (spec == "uniform" || spec == "bolthausen-sznitman") return Lambda_measure::uniform();
    if (name == "dirac") return Lambda_measure::dirac(need_arg());
    if (name == "beta-coalescent") return Lambda_measure::beta_coalescent(need_arg());
    if (name == "eldon-wakeley") return Lambda_measure::eldon_wakeley(need_arg());
    if (name == "durrett-schweinsberg") return Lambda_measure::durrett_schweinsberg(need_arg());
    if (name == "beta") {
      auto comma = arg.find(',');
      if (comma == std::string::npos) throw Data_error{"beta needs two shapes, e.g. beta:0.5,1.5"};
      return Lambda_measure::beta(parse_double(arg.substr(0, comma), "beta shape"),
                                  parse_double(arg.substr(comma + 1), "beta shape"));
    }
  } catch (const Domain_error& e) {
    throw Data_error{std::string{"invalid measure: "} + e.what()};
  }
  if (std::filesystem::exists(spec)) return measure_from_key_values(read_key_values(spec));
  throw Data_error{"unknown measure '" + spec + "' (not a known family or an existing file)"};
}

auto write_moments_csv(std::ostream& out, const Moment_sequence& seq) -> void {
  out << "lambda_k\n";
  out << std::setprecision(17);
  for (auto v : seq.values()) out << v << '\n';
}

auto parse_moments_csv(std::istream& in) -> Moment_sequence {
  auto line = std::string{};
  auto values = std::vector<double>{};
  auto header_seen = false;
  auto line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      if (t != "lambda_k") throw Data_error{"moments CSV must start with header lambda_k"};
      header_seen = true;
      continue;
    }
    values.push_back(parse_double(t, "moment on line " + std::to_string(line_no)));
  }
  if (values.empty()) throw Data_error{"moments CSV has no values"};
  return Moment_sequence{std::move(values)};
}

}  // namespace lambda_infer
