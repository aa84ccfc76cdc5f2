#include "ratekit/fitting.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratekit {

double avg_neg_loglike(const ModelConfig& config,
                       std::span<const MatchRecord> matches,
                       const SurfaceSet& surfaces) {
  if (matches.empty())
    throw std::invalid_argument("avg_neg_loglike: no matches");
  const auto system = make_system(config, surfaces);
  double acc = 0.0;
  for (const MatchRecord& match : matches) {
    const double p =
        std::clamp(system->process(match), 1e-15, 1.0 - 1e-15);
    acc -= std::log(p);
  }
  return acc / static_cast<double>(matches.size());
}

namespace {

// Shortest round-trip decimal form, so grid values survive the textual
// config path exactly.
std::string format_exact(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

ModelConfig build_config(const ParamSpace& space,
                         const std::vector<std::string>& names,
                         const std::vector<double>& values,
                         const SurfaceSet& surfaces) {
  std::map<std::string, std::string> params = space.fixed;
  for (std::size_t i = 0; i < names.size(); ++i)
    params[names[i]] = format_exact(values[i]);
  return make_config(space.model, params, surfaces);
}

bool tuple_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool better(double fa, const std::vector<double>& xa, double fb,
            const std::vector<double>& xb) {
  if (fa != fb) return fa < fb;
  return tuple_less(xa, xb);
}

struct Objective {
  const ParamSpace& space;
  const std::vector<std::string>& names;
  std::span<const MatchRecord> train;
  const SurfaceSet& surfaces;
  std::vector<FitEvaluation>* log = nullptr;

  // Invalid interior points (a correlation matrix losing definiteness)
  // score as +inf rather than erroring out of the search.
  double operator()(const std::vector<double>& x) const {
    double f;
    try {
      f = avg_neg_loglike(build_config(space, names, x, surfaces), train,
                          surfaces);
    } catch (const std::domain_error&) {
      f = std::numeric_limits<double>::infinity();
    }
    if (log) log->push_back({x, f});
    return f;
  }
};

struct SimplexResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
};

// Nelder-Mead inside a box; iterates project onto the box before
// evaluation. Stops when the simplex diameter, scaled by the box widths,
// falls below tol in every coordinate.
SimplexResult refine_simplex(const Objective& objective,
                             const std::vector<double>& seed,
                             const std::vector<double>& lo,
                             const std::vector<double>& hi, double tol,
                             int max_iter) {
  const std::size_t dim = seed.size();
  auto project = [&](std::vector<double> x) {
    for (std::size_t d = 0; d < dim; ++d) x[d] = std::clamp(x[d], lo[d], hi[d]);
    return x;
  };
  struct Vertex {
    std::vector<double> x;
    double f;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  {
    const std::vector<double> x0 = project(seed);
    simplex.push_back({x0, objective(x0)});
    for (std::size_t d = 0; d < dim; ++d) {
      std::vector<double> x = x0;
      const double step = 0.1 * (hi[d] - lo[d]);
      x[d] = x0[d] + step <= hi[d] ? x0[d] + step : x0[d] - step;
      x = project(x);
      simplex.push_back({x, objective(x)});
    }
  }
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) {
                       return better(a.f, a.x, b.f, b.x);
                     });
  };
  auto converged = [&] {
    for (std::size_t d = 0; d < dim; ++d) {
      double mn = simplex[0].x[d], mx = simplex[0].x[d];
      for (const Vertex& v : simplex) {
        mn = std::min(mn, v.x[d]);
        mx = std::max(mx, v.x[d]);
      }
      if ((mx - mn) / (hi[d] - lo[d]) >= tol) return false;
    }
    return true;
  };
  order();
  for (int it = 0; it < max_iter && !converged(); ++it) {
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v)
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v].x[d];
    for (double& c : centroid) c /= static_cast<double>(dim);
    const Vertex& worst = simplex[dim];
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = centroid[d] + t * (centroid[d] - worst.x[d]);
      return project(x);
    };
    const std::vector<double> xr = along(1.0);
    const double fr = objective(xr);
    if (better(fr, xr, simplex[0].f, simplex[0].x)) {
      const std::vector<double> xe = along(2.0);
      const double fe = objective(xe);
      simplex[dim] = better(fe, xe, fr, xr) ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (better(fr, xr, simplex[dim - 1].f, simplex[dim - 1].x)) {
      simplex[dim] = {xr, fr};
    } else {
      const bool outside = better(fr, xr, worst.f, worst.x);
      const std::vector<double> xc = along(outside ? 0.5 : -0.5);
      const double fc = objective(xc);
      if (better(fc, xc, outside ? fr : worst.f, outside ? xr : worst.x)) {
        simplex[dim] = {xc, fc};
      } else {
        for (std::size_t v = 1; v <= dim; ++v) {
          std::vector<double> x(dim);
          for (std::size_t d = 0; d < dim; ++d)
            x[d] = simplex[0].x[d] + 0.5 * (simplex[v].x[d] - simplex[0].x[d]);
          x = project(x);
          simplex[v] = {x, objective(x)};
        }
      }
    }
    order();
  }
  return {simplex[0].x, simplex[0].f};
}

}  // namespace

FitResult fit(const ParamSpace& space, std::span<const MatchRecord> train,
              Execution exec, const SurfaceSet& surfaces) {
  FitResult result;
  std::vector<ParamAxis> axes = space.axes;
  std::sort(axes.begin(), axes.end(),
            [](const ParamAxis& a, const ParamAxis& b) { return a.name < b.name; });
  for (std::size_t i = 0; i + 1 < axes.size(); ++i)
    if (axes[i].name == axes[i + 1].name)
      throw std::invalid_argument("fit: duplicate axis " + axes[i].name);
  for (const ParamAxis& axis : axes) {
    if (axis.values.empty())
      throw std::invalid_argument("fit: empty axis " + axis.name);
    result.param_names.push_back(axis.name);
  }

  // Cartesian grid over the sorted axes, rejecting invalid combinations.
  std::vector<std::vector<double>> grid;
  std::vector<std::size_t> odo(axes.size(), 0);
  while (true) {
    std::vector<double> point(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d)
      point[d] = axes[d].values[odo[d]];
    try {
      build_config(space, result.param_names, point, surfaces);
      grid.push_back(std::move(point));
    } catch (const std::domain_error&) {
      ++result.rejected_grid_points;
    }
    std::size_t d = axes.size();
    while (d > 0 && ++odo[d - 1] == axes[d - 1].values.size()) odo[--d] = 0;
    if (d == 0) break;
  }
  if (grid.empty())
    throw std::runtime_error("fit: no valid grid points");

  const int count = static_cast<int>(grid.size());
  std::vector<double> values(grid.size());
  std::vector<std::string> failures(grid.size());
  auto eval_one = [&](int i) {
    try {
      values[i] = avg_neg_loglike(
          build_config(space, result.param_names, grid[i], surfaces), train,
          surfaces);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) eval_one(i);
  } else {
    for (int i = 0; i < count; ++i) eval_one(i);
  }
  for (const std::string& f : failures)
    if (!f.empty()) throw std::runtime_error("fit: " + f);

  result.evaluation_log.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    result.evaluation_log.push_back({grid[i], values[i]});
  result.grid_evaluations = grid.size();

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (better(values[i], grid[i], values[best], grid[best])) best = i;
  std::vector<double> best_x = grid[best];
  double best_f = values[best];

  if (space.refine && !axes.empty()) {
    std::vector<double> lo(axes.size()), hi(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) {
      const auto it = space.bounds.find(axes[d].name);
      if (it != space.bounds.end()) {
        lo[d] = it->second.first;
        hi[d] = it->second.second;
      } else {
        const auto [mn, mx] =
            std::minmax_element(axes[d].values.begin(), axes[d].values.end());
        lo[d] = *mn;
        hi[d] = *mx;
      }
      if (!(hi[d] > lo[d]))
        throw std::invalid_argument("fit: refinement needs a widthed box for " +
                                    axes[d].name);
    }
    std::vector<std::size_t> by_value(grid.size());
    for (std::size_t i = 0; i < by_value.size(); ++i) by_value[i] = i;
    std::stable_sort(by_value.begin(), by_value.end(),
                     [&](std::size_t a, std::size_t b) {
                       return better(values[a], grid[a], values[b], grid[b]);
                     });
    const int seeds =
        std::min<int>(space.refine_seeds, static_cast<int>(grid.size()));
    std::vector<SimplexResult> refined(seeds);
    std::vector<std::vector<FitEvaluation>> logs(seeds);
    std::vector<std::string> seed_failures(seeds);
    auto refine_one = [&](int s) {
      try {
        Objective objective{space, result.param_names, train, surfaces,
                            &logs[s]};
        refined[s] =
            refine_simplex(objective, grid[by_value[s]], lo, hi,
                           space.refine_tol, space.refine_max_iter);
      } catch (const std::exception& e) {
        seed_failures[s] = e.what();
      }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (int s = 0; s < seeds; ++s) refine_one(s);
    } else {
      for (int s = 0; s < seeds; ++s) refine_one(s);
    }
    for (const std::string& f : seed_failures)
      if (!f.empty()) throw std::runtime_error("fit: " + f);
    for (int s = 0; s < seeds; ++s) {
      result.evaluation_log.insert(result.evaluation_log.end(),
                                   logs[s].begin(), logs[s].end());
      if (better(refined[s].f, refined[s].x, best_f, best_x)) {
        best_f = refined[s].f;
        best_x = refined[s].x;
      }
    }
  }

  for (std::size_t d = 0; d < axes.size(); ++d)
    result.best_params[axes[d].name] = best_x[d];
  result.train_avg_neg_loglike = best_f;
  return result;
}

}  // namespace ratekit
