#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "mllab/atoms.hpp"
#include "mllab/dyadic.hpp"

namespace mllab {

using json = nlohmann::json;

/// Parse the step-function wire format
///   {"dim": 1, "level": 0, "cells": [{"index": [0], "value": 2.0}, ...]}
/// Duplicate cell indices are rejected.
inline StepFunction step_function_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("step function: expected an object");
  const int dim = j.at("dim").get<int>();
  detail::check_dim(dim);
  StepFunction f(dim, j.at("level").get<int>());
  for (const json& cell : j.at("cells")) {
    const json& idx = cell.at("index");
    if (static_cast<int>(idx.size()) != dim)
      throw std::invalid_argument("step function: index length does not match dim");
    CellIndex k{idx.at(0).get<std::int64_t>(), dim == 2 ? idx.at(1).get<std::int64_t>() : 0};
    if (f.cells.count(k))
      throw std::invalid_argument("step function: duplicate cell index");
    f.set(k, cell.at("value").get<double>());
  }
  return f;
}

inline json step_function_to_json(const StepFunction& f) {
  json cells = json::array();
  for (const auto& [k, v] : f.cells) {
    json idx = json::array();
    idx.push_back(k[0]);
    if (f.dim == 2) idx.push_back(k[1]);
    cells.push_back({{"index", idx}, {"value", v}});
  }
  return json{{"dim", f.dim}, {"level", f.level}, {"cells", cells}};
}

/// Atom-family wire format:
///   {"v": 0.5, "atoms": [{"cube": {"level": 0, "index": [0]},
///                         "lambda": 1.0, "K": 0, "data": {...}}]}
inline AtomFamily atom_family_from_json(const json& j) {
  AtomFamily fam;
  fam.aggregation_v = j.at("v").get<double>();
  for (const json& ja : j.at("atoms")) {
    const json& jc = ja.at("cube");
    StepFunction data = step_function_from_json(ja.at("data"));
    const json& idx = jc.at("index");
    DyadicCube cube(data.dim, jc.at("level").get<int>(),
                    {idx.at(0).get<std::int64_t>(),
                     data.dim == 2 ? idx.at(1).get<std::int64_t>() : 0});
    fam.atoms.push_back(Atom{cube, std::move(data), ja.at("K").get<int>()});
    fam.coefficients.push_back(ja.at("lambda").get<double>());
  }
  fam.validate_shape();
  return fam;
}

inline json atom_family_to_json(const AtomFamily& fam) {
  json atoms = json::array();
  for (std::size_t i = 0; i < fam.atoms.size(); ++i) {
    const Atom& a = fam.atoms[i];
    json idx = json::array();
    idx.push_back(a.support_cube.index[0]);
    if (a.support_cube.dim == 2) idx.push_back(a.support_cube.index[1]);
    atoms.push_back({{"cube", {{"level", a.support_cube.level}, {"index", idx}}},
                     {"lambda", fam.coefficients[i]},
                     {"K", a.cancellation_degree},
                     {"data", step_function_to_json(a.data)}});
  }
  return json{{"v", fam.aggregation_v}, {"atoms", atoms}};
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);  // parse_error carries byte position
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mllab
