#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "blowup/field.hpp"
#include "blowup/version.hpp"

namespace blowup {

using json = nlohmann::ordered_json;

/// Shortest-roundtrip-safe decimal form (%.17g). Non-finite values print as
/// inf, -inf, nan.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json grid_to_json(const TorusGrid& g) {
  return {{"n", g.dim()}, {"r", g.period_exponents()}, {"M", g.mode_counts()}};
}

inline TorusGrid grid_from_json(const json& j) {
  const auto r = j.at("r").get<std::vector<int>>();
  const auto m = j.at("M").get<std::vector<std::size_t>>();
  detail::require(j.at("n").get<int>() == static_cast<int>(r.size()),
                  "field json: n does not match the length of r");
  return TorusGrid(r, m);
}

/// Container: grid, row-major layout tag, coefficients as [re, im] pairs,
/// declared support and spectrum tags.
inline json field_to_json(const SpectralField& f) {
  json coeffs = json::array();
  for (const auto& c : f.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"format", "blowup-spectral-field"},
          {"version", kVersion},
          {"grid", grid_to_json(f.grid())},
          {"layout", "row-major, axis 0 slowest, FFT order"},
          {"support", {{"axis", f.support().axis}, {"radius", f.support().radius}}},
          {"real_valued", f.real_valued()},
          {"nonnegative", f.nonnegative()},
          {"coeffs", std::move(coeffs)}};
}

inline SpectralField field_from_json(const json& j) {
  detail::require(j.value("format", "") == "blowup-spectral-field",
                  "field json: missing or wrong format tag");
  auto grid = grid_from_json(j.at("grid"));
  const auto& arr = j.at("coeffs");
  detail::require(arr.size() == grid.size(), "field json: coefficient count does not match grid");
  std::vector<cplx> c;
  c.reserve(arr.size());
  for (const auto& p : arr) c.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  SpectralSupport s{j.at("support").at("axis").get<std::vector<double>>(),
                    j.at("support").at("radius").get<double>()};
  return SpectralField(std::move(grid), std::move(c), std::move(s),
                       j.at("real_valued").get<bool>(), j.at("nonnegative").get<bool>());
}

/// CSV with '#' comment lines carrying the run configuration and version,
/// then one header row. Comma separated, LF line ends.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, std::string>;

  CsvWriter(const std::string& path, const json& config, const std::vector<std::string>& header)
      : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw Error("cannot open output file " + path);
    out_ << "# config " << config.dump() << '\n';
    out_ << "# version " << kVersion << '\n';
    write_line(header);
  }

  void row(const std::vector<Cell>& cells) {
    detail::require(cells.size() == columns_, "csv: row width does not match header");
    std::vector<std::string> s;
    for (const auto& c : cells) {
      if (const auto* d = std::get_if<double>(&c)) s.push_back(format_double(*d));
      else if (const auto* l = std::get_if<long>(&c)) s.push_back(std::to_string(*l));
      else s.push_back(std::get<std::string>(c));
    }
    write_line(s);
  }

 private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_;
};

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file " + path);
  out << j.dump(2) << '\n';
}

}  // namespace blowup
