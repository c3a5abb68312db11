#include "hetnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "hetnet/zfbf.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {
namespace {

using std::numbers::pi;

double dist2(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

void sample_disc(double density, double radius, Rng& rng, std::vector<Point>& out) {
  if (density <= 0.0 || radius <= 0.0) return;
  std::poisson_distribution<std::int64_t> count(density * pi * radius * radius);
  std::uniform_real_distribution<double> coord(-radius, radius);
  const std::int64_t n = count(rng);
  const double r2 = radius * radius;
  out.reserve(out.size() + static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n;) {
    const Point p{coord(rng), coord(rng)};
    if (p.x * p.x + p.y * p.y > r2) continue;
    out.push_back(p);
    ++i;
  }
}

// Uniform grid over a point set with expanding-ring nearest-neighbour search.
class GridIndex {
 public:
  GridIndex(std::span<const Point> points, double cell) : points_(points), cell_(cell) {
    if (points.empty()) return;
    double x1 = points[0].x, y1 = points[0].y;
    x0_ = x1;
    y0_ = y1;
    for (const Point& p : points) {
      x0_ = std::min(x0_, p.x);
      y0_ = std::min(y0_, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    nx_ = static_cast<int>((x1 - x0_) / cell_) + 1;
    ny_ = static_cast<int>((y1 - y0_) / cell_) + 1;
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<int> cell_of(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of[i] = cell_index(cell_x(points[i].x), cell_y(points[i].y));
      ++start_[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    ids_.resize(points.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i)
      ids_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[i])]++)] =
          static_cast<int>(i);
  }

  // Index of the nearest point and its squared distance; -1 if empty.
  std::pair<int, double> nearest(Point q) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    if (points_.empty()) return {best, best_d2};
    const int cx = static_cast<int>(std::floor((q.x - x0_) / cell_));
    const int cy = static_cast<int>(std::floor((q.y - y0_) / cell_));
    const int max_ring = std::max({std::abs(cx), std::abs(cx - nx_ + 1), std::abs(cy),
                                   std::abs(cy - ny_ + 1)});
    for (int r = 0; r <= max_ring; ++r) {
      for (int ix = cx - r; ix <= cx + r; ++ix) {
        if (ix < 0 || ix >= nx_) continue;
        const bool edge_x = ix == cx - r || ix == cx + r;
        for (int iy = cy - r; iy <= cy + r; iy += (edge_x ? 1 : 2 * std::max(r, 1))) {
          if (iy < 0 || iy >= ny_) continue;
          const std::size_t c = static_cast<std::size_t>(cell_index(ix, iy));
          for (int k = start_[c]; k < start_[c + 1]; ++k) {
            const int id = ids_[static_cast<std::size_t>(k)];
            const double d2 = dist2(points_[static_cast<std::size_t>(id)], q);
            if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
              best_d2 = d2;
              best = id;
            }
          }
        }
      }
      // Distance from q to the outside of the searched square of cells.
      const double reach = std::min({q.x - (x0_ + (cx - r) * cell_), x0_ + (cx + r + 1) * cell_ - q.x,
                                     q.y - (y0_ + (cy - r) * cell_), y0_ + (cy + r + 1) * cell_ - q.y});
      if (best >= 0 && best_d2 <= reach * reach) break;
    }
    return {best, best_d2};
  }

 private:
  int cell_x(double x) const { return std::clamp(static_cast<int>((x - x0_) / cell_), 0, nx_ - 1); }
  int cell_y(double y) const { return std::clamp(static_cast<int>((y - y0_) / cell_), 0, ny_ - 1); }
  int cell_index(int ix, int iy) const { return iy * nx_ + ix; }

  std::span<const Point> points_;
  double cell_;
  double x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<int> start_;
  std::vector<int> ids_;
};

class Associator {
 public:
  Associator(const Deployment& dep, const NetworkConfig& cfg)
      : cfg_(cfg),
        macros_(dep.macros, 1.0 / std::sqrt(cfg.macro.density)),
        picos_(dep.picos, 1.0 / std::sqrt(cfg.pico.density)),
        log_p1_(std::log(cfg.macro.power)),
        log_p2_(std::log(cfg.pico.power)),
        log_bias_(std::log(cfg.bias)) {
    if (dep.macros.empty()) throw std::invalid_argument("associate_and_classify: no macro-BS in window");
    if (dep.picos.empty()) throw std::invalid_argument("associate_and_classify: no pico-BS in window");
  }

  UserAssociation classify(Point q) const {
    const auto [m, dm2] = macros_.nearest(q);
    const auto [p, dp2] = picos_.nearest(q);
    // Received powers in log form: log P_j - (alpha_j / 2) log Z_j^2.
    const double lm = log_p1_ - 0.5 * cfg_.macro.pathloss * std::log(dm2);
    const double lp = log_p2_ - 0.5 * cfg_.pico.pathloss * std::log(dp2);
    UserAssociation a;
    a.nearest_macro = m;
    a.nearest_pico = p;
    if (lm >= lp + log_bias_) {
      a.serving_tier = Tier::Macro;
      a.serving = m;
      a.type = UserType::Macro;
    } else {
      a.serving_tier = Tier::Pico;
      a.serving = p;
      a.type = lp > lm ? UserType::PicoUnoffloaded : UserType::Offloaded;
    }
    return a;
  }

 private:
  const NetworkConfig& cfg_;
  GridIndex macros_;
  GridIndex picos_;
  double log_p1_, log_p2_, log_bias_;
};

AssociationRealization associate(const Deployment& dep, const Associator& assoc) {
  AssociationRealization ar;
  ar.users.reserve(dep.users.size());
  ar.macro_users.resize(dep.macros.size());
  ar.pico_users.resize(dep.picos.size());
  ar.offloaded_by_macro.resize(dep.macros.size());
  for (std::size_t i = 0; i < dep.users.size(); ++i) {
    const UserAssociation a = assoc.classify(dep.users[i]);
    const int id = static_cast<int>(i);
    (a.serving_tier == Tier::Macro ? ar.macro_users : ar.pico_users)[static_cast<std::size_t>(a.serving)]
        .push_back(id);
    if (a.type == UserType::Offloaded)
      ar.offloaded_by_macro[static_cast<std::size_t>(a.nearest_macro)].push_back(id);
    ar.users.push_back(a);
  }
  return ar;
}

double exp_draw(Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  return e(rng);
}

double gamma_draw(int shape, Rng& rng) {
  double g = 0.0;
  for (int i = 0; i < shape; ++i) g += exp_draw(rng);
  return g;
}

// ZF precoder with resampling on the (probability zero) rank failure.
Eigen::VectorXcd precoder_for(Eigen::MatrixXcd& channels, Rng& rng) {
  while (true) {
    try {
      return zfbf_precoder(channels);
    } catch (const RankDeficientError&) {
      for (Eigen::Index c = 0; c < channels.cols(); ++c)
        channels.col(c) = complex_gaussian(static_cast<int>(channels.rows()), rng);
    }
  }
}

struct TrialOutput {
  TrialRecord record;
  std::vector<double> sir;  // per U
};

TrialOutput run_trial(const NetworkConfig& cfg, const SimulationOptions& opt, double window,
                      std::uint64_t index) {
  Rng rng = trial_rng(opt.seed, index);
  const int n1 = cfg.macro.antennas;
  const int n2 = cfg.pico.antennas;

  Deployment dep;
  dep.window_radius = window;
  sample_disc(cfg.macro.density, window, rng, dep.macros);
  sample_disc(cfg.pico.density, window, rng, dep.picos);
  if (dep.macros.size() < 3 || dep.picos.empty())
    throw InsufficientWindowError("simulate_trials: window holds fewer than three macro-BSs or no pico-BS");

  // Nearest, and third-nearest, macro of the typical user; nearest pico.
  std::array<double, 3> macro_d2{std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity()};
  for (const Point& p : dep.macros) {
    const double d2 = p.x * p.x + p.y * p.y;
    if (d2 < macro_d2[2]) {
      macro_d2[2] = d2;
      std::sort(macro_d2.begin(), macro_d2.end());
    }
  }
  double pico_d2 = std::numeric_limits<double>::infinity();
  for (const Point& p : dep.picos) pico_d2 = std::min(pico_d2, p.x * p.x + p.y * p.y);

  const double x0 = std::sqrt(macro_d2[0]);
  const double y0 = std::sqrt(pico_d2);
  dep.user_radius = std::max(x0, y0) + opt.user_disc_factor / std::sqrt(pi * cfg.macro.density);
  dep.users.push_back({0.0, 0.0});
  sample_disc(cfg.user_density, dep.user_radius, rng, dep.users);

  const Associator assoc(dep, cfg);
  const AssociationRealization ar = associate(dep, assoc);
  const SlotSchedule sched = schedule_slot(ar, rng, 0);
  const UserAssociation& me = ar.users[0];
  const int m0 = me.nearest_macro;
  const int p0 = me.nearest_pico;

  TrialOutput out;
  TrialRecord& rec = out.record;
  rec.type = me.type;
  rec.macro_distance = x0;
  rec.pico_distance = y0;
  rec.load = ar.load(me.serving_tier, me.serving);
  rec.window_guard = std::sqrt(macro_d2[2]) > 0.5 * window;
  const auto& active = sched.active_offloaded[static_cast<std::size_t>(m0)];
  rec.active_offloaded = static_cast<int>(active.size());
  if (me.type == UserType::Macro) {
    rec.abs_load = rec.load;
  } else {
    int same = 0;
    for (int u : ar.pico_users[static_cast<std::size_t>(p0)])
      if (ar.users[static_cast<std::size_t>(u)].type == me.type) ++same;
    rec.abs_load = same;
  }
  if (me.type == UserType::Offloaded)
    rec.in_rank = static_cast<int>(std::find(active.begin(), active.end(), 0) - active.begin());

  // Relevant cells reaching the disc edge: the nearest macro's cell (its
  // offloaded users) or the serving cell (the load).
  constexpr int kProbes = 32;
  for (int k = 0; k < kProbes && !rec.disc_boundary; ++k) {
    const double th = 2.0 * pi * k / kProbes;
    const UserAssociation a =
        assoc.classify({dep.user_radius * std::cos(th), dep.user_radius * std::sin(th)});
    if (a.nearest_macro == m0 ||
        (a.serving_tier == me.serving_tier && a.serving == me.serving))
      rec.disc_boundary = true;
  }

  // Interference with unit-exponential gains, split by the nearest BS of each tier.
  const double a1 = cfg.macro.pathloss;
  const double a2 = cfg.pico.pathloss;
  const double rho1 = cfg.macro.power;
  const double rho2 = cfg.pico.power;
  double macro_rest = 0.0;
  double pico_rest = 0.0;
  for (std::size_t i = 0; i < dep.macros.size(); ++i) {
    if (static_cast<int>(i) == m0) continue;
    const Point& p = dep.macros[i];
    macro_rest += exp_draw(rng) * std::pow(p.x * p.x + p.y * p.y, -0.5 * a1);
  }
  for (std::size_t i = 0; i < dep.picos.size(); ++i) {
    if (static_cast<int>(i) == p0) continue;
    const Point& p = dep.picos[i];
    pico_rest += exp_draw(rng) * std::pow(p.x * p.x + p.y * p.y, -0.5 * a2);
  }
  macro_rest *= rho1;
  pico_rest *= rho2;
  const double macro_path = rho1 * std::pow(x0, -a1);
  const double pico_path = rho2 * std::pow(y0, -a2);
  const double nearest_macro_exp = exp_draw(rng);
  const double nearest_pico_exp = exp_draw(rng);

  out.sir.assign(static_cast<std::size_t>(n1), 0.0);
  const bool full = opt.fidelity == Fidelity::Full;

  switch (me.type) {
    case UserType::Macro: {
      const double interference = macro_rest + pico_rest + nearest_pico_exp * pico_path;
      // Signal gain for every IN DoF u = 0..min(N1 - 1, A).
      const int u_max = std::min(n1 - 1, rec.active_offloaded);
      std::vector<double> gain(static_cast<std::size_t>(u_max) + 1);
      if (full) {
        Eigen::MatrixXcd channels(n1, u_max + 1);
        for (int c = 0; c <= u_max; ++c) channels.col(c) = complex_gaussian(n1, rng);
        for (int u = 0; u <= u_max; ++u) {
          Eigen::MatrixXcd sub = channels.leftCols(u + 1);
          const Eigen::VectorXcd f = precoder_for(sub, rng);
          gain[static_cast<std::size_t>(u)] = std::norm(sub.col(0).dot(f));
          for (int c = 1; c <= u; ++c)
            rec.max_nulled_gain = std::max(rec.max_nulled_gain,
                                           std::norm(sub.col(c).dot(f)) / sub.col(c).squaredNorm());
        }
      } else {
        std::vector<double> e(static_cast<std::size_t>(n1));
        for (double& v : e) v = exp_draw(rng);
        for (int u = 0; u <= u_max; ++u) {
          double g = 0.0;
          for (int i = 0; i < n1 - u; ++i) g += e[static_cast<std::size_t>(i)];
          gain[static_cast<std::size_t>(u)] = g;
        }
      }
      for (int U = 0; U < n1; ++U)
        out.sir[static_cast<std::size_t>(U)] =
            gain[static_cast<std::size_t>(std::min(U, u_max))] * macro_path / interference;
      rec.sir_abs = gain[0] * macro_path / interference;
      break;
    }
    case UserType::PicoUnoffloaded: {
      const double g = full ? complex_gaussian(n2, rng).squaredNorm() : gamma_draw(n2, rng);
      const double sir = g * pico_path / (macro_rest + pico_rest + nearest_macro_exp * macro_path);
      std::fill(out.sir.begin(), out.sir.end(), sir);
      rec.sir_abs = sir;
      break;
    }
    case UserType::Offloaded: {
      const double g = full ? complex_gaussian(n2, rng).squaredNorm() : gamma_draw(n2, rng);
      const double signal = g * pico_path;
      const double base = macro_rest + pico_rest;
      rec.sir_nulled = signal / base;
      rec.sir_abs = signal / pico_rest;
      const int a = rec.active_offloaded;
      // Gain from the nearest macro when u_0 is not nulled, per U.
      std::vector<double> unnulled(static_cast<std::size_t>(n1), nearest_macro_exp);
      if (full) {
        // Columns: the macro's own scheduled user, then the other IN targets.
        const int others = std::min(n1 - 1, a - 1);
        Eigen::MatrixXcd channels(n1, others + 1);
        for (int c = 0; c <= others; ++c) channels.col(c) = complex_gaussian(n1, rng);
        const Eigen::VectorXcd mine = complex_gaussian(n1, rng);
        for (int U = 0; U < n1; ++U) {
          const int u = std::min(U, a);
          if (rec.in_rank < U) {
            // u_0 is one of the u targets.
            Eigen::MatrixXcd sub(n1, u + 1);
            sub.col(0) = channels.col(0);
            sub.col(1) = mine;
            for (int c = 2; c <= u; ++c) sub.col(c) = channels.col(c - 1);
            const Eigen::VectorXcd f = precoder_for(sub, rng);
            rec.max_nulled_gain =
                std::max(rec.max_nulled_gain, std::norm(mine.dot(f)) / mine.squaredNorm());
            // Un-nulled reference at this U: the other targets only.
            Eigen::MatrixXcd ref = channels.leftCols(std::min(u - 1, others) + 1);
            unnulled[static_cast<std::size_t>(U)] = std::norm(mine.dot(precoder_for(ref, rng)));
          } else {
            Eigen::MatrixXcd sub = channels.leftCols(std::min(u, others) + 1);
            unnulled[static_cast<std::size_t>(U)] = std::norm(mine.dot(precoder_for(sub, rng)));
          }
        }
      }
      for (int U = 0; U < n1; ++U) {
        out.sir[static_cast<std::size_t>(U)] =
            rec.in_rank < U ? rec.sir_nulled
                            : signal / (base + unnulled[static_cast<std::size_t>(U)] * macro_path);
      }
      const int u_cfg = std::clamp(cfg.in_dof, 0, n1 - 1);
      rec.sir_unnulled = signal / (base + unnulled[static_cast<std::size_t>(u_cfg)] * macro_path);
      break;
    }
  }
  return out;
}

CoverageEstimate estimate(std::int64_t covered, std::int64_t n) {
  CoverageEstimate e;
  e.covered = covered;
  e.trials = n;
  e.value = n > 0 ? static_cast<double>(covered) / static_cast<double>(n)
                  : std::numeric_limits<double>::quiet_NaN();
  e.ci = wilson_interval(covered, n);
  return e;
}

}  // namespace

double default_window_radius(const NetworkConfig& cfg) {
  return std::max(5.0 / std::sqrt(pi * cfg.macro.density), 2000.0);
}

Deployment sample_deployment(const NetworkConfig& cfg, double window_radius, std::uint64_t seed,
                             double user_radius) {
  if (!(window_radius > 0.0)) throw std::invalid_argument("sample_deployment: window_radius must be > 0");
  if (user_radius <= 0.0) user_radius = window_radius;
  Rng rng = trial_rng(seed, 0);
  Deployment dep;
  dep.window_radius = window_radius;
  dep.user_radius = user_radius;
  sample_disc(cfg.macro.density, window_radius, rng, dep.macros);
  sample_disc(cfg.pico.density, window_radius, rng, dep.picos);
  dep.users.push_back({0.0, 0.0});
  sample_disc(cfg.user_density, user_radius, rng, dep.users);
  return dep;
}

AssociationRealization associate_and_classify(const Deployment& dep, const NetworkConfig& cfg) {
  const Associator assoc(dep, cfg);
  return associate(dep, assoc);
}

int SlotSchedule::in_dof_used(int macro, int U) const {
  return std::min(U, static_cast<int>(active_offloaded[static_cast<std::size_t>(macro)].size()));
}

bool SlotSchedule::is_in_target(int macro, int user, int U) const {
  const auto& list = active_offloaded[static_cast<std::size_t>(macro)];
  const auto it = std::find(list.begin(), list.end(), user);
  return it != list.end() && (it - list.begin()) < U;
}

SlotSchedule schedule_slot(const AssociationRealization& ar, Rng& rng, int forced_user) {
  SlotSchedule s;
  const auto pick = [&](const std::vector<int>& users) {
    if (users.empty()) return -1;
    if (std::find(users.begin(), users.end(), forced_user) != users.end()) return forced_user;
    std::uniform_int_distribution<std::size_t> d(0, users.size() - 1);
    return users[d(rng)];
  };
  s.macro_scheduled.reserve(ar.macro_users.size());
  for (const auto& users : ar.macro_users) s.macro_scheduled.push_back(pick(users));
  s.pico_scheduled.reserve(ar.pico_users.size());
  for (const auto& users : ar.pico_users) s.pico_scheduled.push_back(pick(users));
  s.active_offloaded.resize(ar.macro_users.size());
  for (int u : s.pico_scheduled) {
    if (u < 0) continue;
    const UserAssociation& a = ar.users[static_cast<std::size_t>(u)];
    if (a.type == UserType::Offloaded)
      s.active_offloaded[static_cast<std::size_t>(a.nearest_macro)].push_back(u);
  }
  for (auto& list : s.active_offloaded)
    if (list.size() > 1) std::shuffle(list.begin(), list.end(), rng);
  return s;
}

TrialSet::TrialSet(NetworkConfig cfg, SimulationOptions options, std::vector<TrialRecord> records,
                   std::vector<double> sir_in)
    : cfg_(std::move(cfg)),
      options_(options),
      records_(std::move(records)),
      sir_in_(std::move(sir_in)) {}

double TrialSet::sir(std::size_t i, int U) const {
  const auto n1 = static_cast<std::size_t>(cfg_.macro.antennas);
  return sir_in_[i * n1 + static_cast<std::size_t>(U)];
}

SimulationDiagnostics TrialSet::diagnostics() const {
  SimulationDiagnostics d;
  if (records_.empty()) return d;
  std::int64_t guard = 0, boundary = 0;
  for (const TrialRecord& r : records_) {
    guard += r.window_guard;
    boundary += r.disc_boundary;
    d.max_nulled_gain = std::max(d.max_nulled_gain, r.max_nulled_gain);
  }
  d.window_guard_fraction = static_cast<double>(guard) / static_cast<double>(records_.size());
  d.disc_boundary_fraction = static_cast<double>(boundary) / static_cast<double>(records_.size());
  return d;
}

double TrialSet::rate(std::size_t i, const SchemeSpec& scheme) const {
  const TrialRecord& r = records_[i];
  if (scheme.variant == SchemeSpec::Variant::IN)
    return cfg_.bandwidth / r.load * std::log2(1.0 + sir(i, scheme.in_dof));
  const double share = r.type == UserType::Offloaded ? scheme.abs_fraction : 1.0 - scheme.abs_fraction;
  return share * cfg_.bandwidth / r.abs_load * std::log2(1.0 + r.sir_abs);
}

bool TrialSet::covered(std::size_t i, const SchemeSpec& scheme, double tau) const {
  return rate(i, scheme) > tau;
}

UserClass TrialSet::user_class(std::size_t i, const SchemeSpec& scheme) const {
  const TrialRecord& r = records_[i];
  switch (r.type) {
    case UserType::Macro:
      return UserClass::Macro;
    case UserType::PicoUnoffloaded:
      return UserClass::PicoUnoffloaded;
    case UserType::Offloaded:
      break;
  }
  if (scheme.variant == SchemeSpec::Variant::IN && r.in_rank < scheme.in_dof)
    return UserClass::OffloadedIN;
  return UserClass::OffloadedNonIN;
}

double TrialSet::coverage(const SchemeSpec& scheme, double tau) const {
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < records_.size(); ++i) hits += covered(i, scheme, tau);
  return records_.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(records_.size());
}

TrialSet simulate_trials(const NetworkConfig& cfg, const SimulationOptions& options) {
  validate(cfg);
  if (options.trials < 1) throw ConfigError("simulation.trials", "must be >= 1");
  if (!(options.user_disc_factor > 0.0))
    throw ConfigError("simulation.user_disc_factor", "must be > 0");
  const double window = options.window_radius > 0.0 ? options.window_radius : default_window_radius(cfg);
  const auto n = static_cast<std::size_t>(options.trials);
  const auto n1 = static_cast<std::size_t>(cfg.macro.antennas);

  std::vector<TrialRecord> records(n);
  std::vector<double> sir(n * n1);
  parallel_for(n, options.threads, [&](std::size_t i) {
    TrialOutput t = run_trial(cfg, options, window, i);
    records[i] = t.record;
    std::copy(t.sir.begin(), t.sir.end(), sir.begin() + static_cast<std::ptrdiff_t>(i * n1));
  });

  TrialSet set(cfg, options, std::move(records), std::move(sir));
  const SimulationDiagnostics d = set.diagnostics();
  if (d.window_guard_fraction > 0.01) {
    std::ostringstream msg;
    msg << "simulate_trials: third-nearest macro-BS lies beyond half the window radius ("
        << window << " m) in " << 100.0 * d.window_guard_fraction << "% of trials";
    throw InsufficientWindowError(msg.str());
  }
  return set;
}

CoverageReport coverage_report(const TrialSet& set, const SchemeSpec& scheme,
                               std::span<const double> tau_grid) {
  const int n1 = set.config().macro.antennas;
  if (scheme.variant == SchemeSpec::Variant::IN && (scheme.in_dof < 0 || scheme.in_dof > n1 - 1))
    throw ConfigError("scheme.in_dof", "must lie in [0, macro.antennas - 1]");
  if (scheme.variant == SchemeSpec::Variant::ABS &&
      !(scheme.abs_fraction > 0.0 && scheme.abs_fraction < 1.0))
    throw ConfigError("scheme.abs_fraction", "must lie in (0, 1)");

  CoverageReport rep;
  rep.scheme = scheme;
  rep.tau.assign(tau_grid.begin(), tau_grid.end());
  rep.trials = static_cast<std::int64_t>(set.size());
  rep.seed = set.options().seed;
  rep.fidelity = set.options().fidelity;
  rep.diagnostics = set.diagnostics();

  std::vector<UserClass> cls(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    cls[i] = set.user_class(i, scheme);
    ++rep.class_counts[index(cls[i])];
  }
  for (double tau : tau_grid) {
    std::int64_t total = 0;
    std::array<std::int64_t, 4> per{};
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!set.covered(i, scheme, tau)) continue;
      ++total;
      ++per[index(cls[i])];
    }
    rep.total.push_back(estimate(total, rep.trials));
    for (UserClass k : kUserClasses)
      rep.per_class[index(k)].push_back(estimate(per[index(k)], rep.class_counts[index(k)]));
    rep.offloaded.push_back(estimate(per[index(UserClass::OffloadedIN)] + per[index(UserClass::OffloadedNonIN)],
                                     rep.class_counts[index(UserClass::OffloadedIN)] +
                                         rep.class_counts[index(UserClass::OffloadedNonIN)]));
  }
  return rep;
}

CoverageReport estimate_rate_coverage(const NetworkConfig& cfg, const SchemeSpec& scheme,
                                      std::span<const double> tau_grid, std::int64_t trials,
                                      std::uint64_t seed, Fidelity fidelity) {
  SimulationOptions opt;
  opt.trials = trials;
  opt.seed = seed;
  opt.fidelity = fidelity;
  return coverage_report(simulate_trials(cfg, opt), scheme, tau_grid);
}

std::string_view to_string(UserType t) {
  switch (t) {
    case UserType::Macro:
      return "macro";
    case UserType::PicoUnoffloaded:
      return "pico_unoffloaded";
    case UserType::Offloaded:
      return "offloaded";
  }
  return "unknown";
}

std::string_view to_string(Fidelity f) { return f == Fidelity::Full ? "full" : "fast"; }

void write_realization_dump(std::ostream& out, const TrialSet& set, const SchemeSpec& scheme) {
  out << "trial,type,class,load,sir,rate\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const TrialRecord& r = set.record(i);
    const bool abs = scheme.variant == SchemeSpec::Variant::ABS;
    out << i << ',' << to_string(r.type) << ',' << to_string(set.user_class(i, scheme)) << ','
        << (abs ? r.abs_load : r.load) << ',' << (abs ? r.sir_abs : set.sir(i, scheme.in_dof))
        << ',' << set.rate(i, scheme) << '\n';
  }
}

}  // namespace hetnet
