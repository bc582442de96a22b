#pragma once

// CSV and JSON encodings of grid functions, curves and experiment tables.
// Numbers are written with 17 significant digits so files round-trip.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qprim/curves.hpp"
#include "qprim/dichotomy.hpp"
#include "qprim/pathological_spaces.hpp"
#include "qprim/primitive.hpp"

namespace qprim {

std::string format_number(double v);

/// CSV row `m,v_1,...,v_m`.
std::string grid_function_to_csv(const GridFunction& x);
GridFunction grid_function_from_csv(std::string_view row);
/// {"m": m, "cells": [...]}
std::string grid_function_to_json(const GridFunction& x);
GridFunction grid_function_from_json(std::string_view text);

/// The same function on the coarsest uniform grid containing every breakpoint,
/// if one with at most `cap` cells exists.
std::optional<GridFunction> as_uniform(const StepFunction& f, std::size_t cap = kDefaultRefinementCap);

/// One row `t,m,v_1..v_m` per node. Throws InvalidArgument when a value has no
/// uniform representation.
std::string curve_to_csv(const SampledCurve& f);
SampledCurve curve_from_csv(std::string_view text);
/// JSON array of node records {"t", "m", "cells"}; values without a uniform
/// representation are written as {"t", "breaks", "values"}.
std::string curve_to_json(const SampledCurve& f);

/// `iter,eps_i,n_i,eta_i,c1_bound,residual`
std::string trace_to_csv(const PrimitiveResult& r);
std::string primitive_to_json(const PrimitiveResult& r, double p, double tol, bool include_curve);

/// `N,aN_Z,aN_Y,aN_X,ratio_Y,ratio_X`
std::string counterexample_to_csv(const std::vector<CounterexampleRow>& rows);
std::string counterexample_to_json(const std::vector<CounterexampleRow>& rows, double q);

/// `# space=<s> family=<f>` followed by `N,value` rows.
std::string averaging_to_csv(const std::vector<AveragingRow>& rows, SpaceTag space, const std::string& family);
std::string averaging_to_json(const std::vector<AveragingRow>& rows, SpaceTag space, const std::string& family);

}  // namespace qprim
