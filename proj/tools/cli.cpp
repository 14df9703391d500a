#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "flexlp/analyses.hpp"
#include "flexlp/flock.hpp"
#include "flexlp/io.hpp"
#include "flexlp/structures.hpp"

namespace flexlp::cli {

namespace {

Vec2 parse_pair(const std::string& text, const char* flag) {
  std::istringstream in(text);
  double a = 0.0;
  double b = 0.0;
  char comma = 0;
  const bool ok = (in >> a >> comma >> b) && comma == ',' && (in >> std::ws).eof();
  if (!ok)
    throw InputError(std::string(flag) + " expects two comma-separated numbers, got '" + text + "'");
  return {a, b};
}

std::size_t body_index(const Scene& scene, const std::string& name) {
  for (std::size_t i = 0; i < scene.bodies.size(); ++i)
    if (scene.bodies[i].name == name) return i;
  throw InputError("no body named '" + name + "'");
}

struct ObjectiveFlags {
  std::string direction;
  std::vector<std::string> bodies;
  bool radial = false;
  std::string center;
  std::string file;

  void attach(CLI::App* app) {
    app->add_option("--direction", direction, "translation direction dx,dy");
    app->add_option("--body", bodies, "body the direction applies to (repeatable; default all free)");
    app->add_flag("--radial", radial, "push every free body away from --center");
    app->add_option("--center", center, "radial centre x,y (default: area centroid)");
    app->add_option("--objective", file, "JSON objective file");
  }

  bool given() const { return !direction.empty() || radial || !file.empty(); }

  Objective build(const Scene& scene) const {
    const int kinds = int(!direction.empty()) + int(radial) + int(!file.empty());
    if (kinds != 1) throw InputError("give exactly one of --direction, --radial, --objective");
    if (!bodies.empty() && direction.empty()) throw InputError("--body only applies to --direction");
    if (!center.empty() && !radial) throw InputError("--center only applies to --radial");

    if (!direction.empty()) {
      DirectionGoal g{parse_pair(direction, "--direction"), {}};
      for (const std::string& b : bodies) g.bodies.push_back(body_index(scene, b));
      return make_objective(scene, g);
    }
    if (radial) {
      const Vec2 c = center.empty() ? scene_centroid(scene) : parse_pair(center, "--center");
      return make_objective(scene, RadialGoal{c});
    }
    return from_file(scene);
  }

  Objective from_file(const Scene& scene) const {
    using nlohmann::json;
    json doc;
    try {
      doc = json::parse(io::read_text(file));
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed objective file: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("objective file must hold a JSON object");
    for (const auto& [key, value] : doc.items())
      if (key != "weights" && key != "bodies") throw InputError("unknown field '" + key + "' in objective file");
    if (doc.contains("weights") == doc.contains("bodies"))
      throw InputError("objective file needs exactly one of 'weights' or 'bodies'");

    Objective obj;
    const auto n = static_cast<Eigen::Index>(dof_count(scene));
    obj.weights = Eigen::VectorXd::Zero(n);
    const auto read_number = [](const json& v) {
      if (!v.is_number()) throw InputError("objective weights must be numbers");
      return v.get<double>();
    };
    if (doc.contains("weights")) {
      const json& w = doc["weights"];
      if (!w.is_array() || static_cast<Eigen::Index>(w.size()) != n)
        throw InputError("'weights' must list " + std::to_string(n) + " numbers");
      for (Eigen::Index j = 0; j < n; ++j) obj.weights(j) = read_number(w[static_cast<std::size_t>(j)]);
    } else {
      const std::vector<int> cols = column_blocks(scene);
      if (!doc["bodies"].is_object()) throw InputError("'bodies' must map body names to [wx, wy, wtheta]");
      for (const auto& [name, w] : doc["bodies"].items()) {
        const std::size_t b = body_index(scene, name);
        if (cols[b] < 0) throw InputError("objective body '" + name + "' is fixed");
        if (!w.is_array() || w.size() != 3) throw InputError("weights for '" + name + "' must be [wx, wy, wtheta]");
        for (int k = 0; k < 3; ++k) obj.weights(cols[b] + k) = read_number(w[static_cast<std::size_t>(k)]);
      }
    }
    validate_objective(obj, n);
    return obj;
  }
};

struct StepFlags {
  double eta = StepParams{}.eta;
  int max_iters = StepParams{}.max_iters;

  void attach(CLI::App* app) {
    app->add_option("--eta", eta, "largest overlap an accepted step may leave")->check(CLI::PositiveNumber);
    app->add_option("--max-iters", max_iters, "iteration cap")->check(CLI::PositiveNumber);
  }

  StepParams params() const {
    StepParams p;
    p.eta = eta;
    p.max_iters = max_iters;
    return p;
  }
};

void print_status(std::ostream& out, const StepTrace& trace) {
  out << "status: " << to_string(trace.status) << "\n";
  out << "iterations: " << trace.iterations.size() << "\n";
  out << "jacobian: " << trace.jacobian_rows << " x " << trace.jacobian_cols << "\n";
  out << "objective gain: " << trace.cumulative_objective() << "\n";
  const double violation = trace.iterations.empty() ? 0.0 : trace.iterations.back().violation;
  out << "final violation: " << violation << "\n";
}

void print_displacements(std::ostream& out, const Scene& before, const Scene& after) {
  for (std::size_t i = 0; i < before.bodies.size(); ++i) {
    if (before.bodies[i].fixed) continue;
    const Pose& a = before.bodies[i].pose;
    const Pose& b = after.bodies[i].pose;
    out << "  " << before.bodies[i].name << ": dx " << b.x - a.x << " dy " << b.y - a.y << " dtheta "
        << b.theta - a.theta << "\n";
  }
}

bool step_failed(StepStatus s) { return s != StepStatus::converged && s != StepStatus::max_iters; }

void check_solver() {
  if (const char* s = std::getenv("FLEXLP_SOLVER"); s && std::string(s) != "simplex")
    throw InputError(std::string("unknown solver backend '") + s + "' (available: simplex)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flex analysis of planar polygon assemblies with loose joints", "flexlp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flexlp 1.0");

  std::string scene_path;
  std::string trace_path;
  std::string svg_path;
  ObjectiveFlags objective_flags;
  StepFlags step_flags;

  auto* validate = app.add_subcommand("validate", "parse a scene and report its size");
  validate->add_option("scene", scene_path, "scene file")->required();

  auto* flex = app.add_subcommand("flex", "flex a structure along an objective");
  flex->add_option("scene", scene_path, "scene file")->required();
  objective_flags.attach(flex);
  step_flags.attach(flex);
  flex->add_option("--trace", trace_path, "write a JSON trace");
  flex->add_option("--svg", svg_path, "write an SVG of the initial and final configurations");

  double k = kDefaultSeparationK;
  auto* separate = app.add_subcommand("separate", "test whether some body can escape");
  separate->add_option("scene", scene_path, "scene file")->required();
  separate->add_option("--k", k, "translation-sum target")->check(CLI::PositiveNumber);
  separate->add_option("--svg", svg_path, "write an SVG of the separating step");

  double t_max = 0.0;
  double threshold = 0.0;
  double bisection = 1e-4;
  std::string track;
  std::string track_point;
  auto* tolerance = app.add_subcommand("tolerance", "largest joint inset whose flex stays within a threshold");
  tolerance->add_option("scene", scene_path, "scene file")->required();
  tolerance->add_option("--t-max", t_max, "largest inset tried")->required()->check(CLI::NonNegativeNumber);
  tolerance->add_option("--threshold", threshold, "acceptable displacement of the tracked point")
      ->required()
      ->check(CLI::PositiveNumber);
  tolerance->add_option("--track", track, "body whose motion is measured")->required();
  tolerance->add_option("--point", track_point, "tracked local point x,y (default: body centroid)");
  tolerance->add_option("--bisection-tol", bisection, "bisection tolerance")->check(CLI::PositiveNumber);
  objective_flags.attach(tolerance);
  step_flags.attach(tolerance);

  int flock_iters = 30;
  auto* flock = app.add_subcommand("flock", "compress a robot flock toward its leader's x");
  flock->add_option("scene", scene_path, "scene file with a flock block")->required();
  flock->add_option("--max-iters", flock_iters, "iteration cap")->check(CLI::PositiveNumber);
  flock->add_option("--trace", trace_path, "write a JSON trace");
  flock->add_option("--svg", svg_path, "write an SVG of the initial and final configurations");

  std::vector<int> sizes{36};
  double gap = 0.02;
  double epsilon = 0.05;
  auto* bench = app.add_subcommand("bench", "flex generated jigsaw grids and report sizes and timings");
  bench->add_option("--n", sizes, "number of pieces (repeatable)")->check(CLI::PositiveNumber);
  bench->add_option("--gap", gap, "joint gap")->check(CLI::PositiveNumber);
  bench->add_option("--epsilon", epsilon, "pair selection radius")->check(CLI::PositiveNumber);
  step_flags.attach(bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  try {
    check_solver();

    if (validate->parsed()) {
      const io::SceneFile file = io::load_scene(scene_path);
      for (const std::string& w : file.warnings) err << "warning: " << w << "\n";
      const Scene& s = file.scene;
      const DistanceSystem sys = assemble(s);
      out << "valid scene: " << s.bodies.size() << " bodies, " << s.bodies.size() - free_body_count(s)
          << " fixed, " << dof_count(s) << " free DOFs, " << sys.rows() << " constraint rows";
      if (file.flock) out << ", flock of " << file.flock->robots.size() << " robots";
      out << "\n";
      return kExitOk;
    }

    if (flex->parsed()) {
      const io::SceneFile file = io::load_scene(scene_path);
      for (const std::string& w : file.warnings) err << "warning: " << w << "\n";
      const Objective objective = objective_flags.build(file.scene);
      const StepParams params = step_flags.params();
      const StepTrace trace = flex_iterate(file.scene, objective, params);
      print_status(out, trace);
      print_displacements(out, file.scene, trace.final_scene);
      if (!trace_path.empty())
        io::write_text(trace_path, io::serialize_trace(file.scene, trace, {"flex", objective, params}, file.flock));
      if (!svg_path.empty()) io::render_svg(file.scene, trace.final_scene, svg_path);
      return step_failed(trace.status) ? kExitAnalysis : kExitOk;
    }

    if (separate->parsed()) {
      const io::SceneFile file = io::load_scene(scene_path);
      for (const std::string& w : file.warnings) err << "warning: " << w << "\n";
      const Scene& s = file.scene;
      const SeparationVerdict v = classify_separability(s, k);
      if (!v.separable) {
        out << "inseparable under linear model\n";
        return kExitAnalysis;
      }
      const Bounds trust = escape_bounds(s);
      const Displacement step = fit_to_bounds(v.displacement, trust);
      const double scale = line_search(s, step, StepParams{}, &trust);
      out << "separable (" << (v.sign == SeparationSign::positive ? "positive" : "negative")
          << " translation sum)\n";
      out << "direction:\n";
      const double norm = v.displacement.norm();
      const Scene unit = apply_displacement(s, v.displacement, norm > 0.0 ? 1.0 / norm : 0.0);
      print_displacements(out, s, unit);
      out << "safe step scale: " << scale << "\n";
      if (!svg_path.empty()) io::render_svg(s, apply_displacement(s, step, scale), svg_path);
      return kExitOk;
    }

    if (tolerance->parsed()) {
      const io::SceneFile file = io::load_scene(scene_path);
      for (const std::string& w : file.warnings) err << "warning: " << w << "\n";
      const Scene& s = file.scene;
      ToleranceQuery q;
      q.t_max = t_max;
      q.threshold = threshold;
      q.bisection_tolerance = bisection;
      q.track_body = body_index(s, track);
      if (!track_point.empty()) q.track_point = parse_pair(track_point, "--point");
      q.params = step_flags.params();
      if (objective_flags.given()) {
        // Validate the flags against the original scene; the goal is rebuilt per inset.
        objective_flags.build(s);
        if (!objective_flags.file.empty()) throw InputError("tolerance takes --direction or --radial, not --objective");
        if (objective_flags.radial) {
          q.goal = RadialGoal{objective_flags.center.empty() ? scene_centroid(s)
                                                              : parse_pair(objective_flags.center, "--center")};
        } else {
          DirectionGoal g{parse_pair(objective_flags.direction, "--direction"), {}};
          for (const std::string& b : objective_flags.bodies) g.bodies.push_back(body_index(s, b));
          q.goal = g;
        }
      }
      const ToleranceResult r = tolerance_search(s, q);
      for (const ToleranceProbe& p : r.probes) out << "probe t=" << p.t << " metric=" << p.metric << "\n";
      if (!r.monotone) err << "warning: flex metric is not monotone in the inset on the probed points\n";
      if (r.probes.front().metric > threshold) {
        out << "flex at t=0 already exceeds the threshold; t* = 0\n";
        return kExitAnalysis;
      }
      out << "t* = " << r.t_star << "\n";
      return kExitOk;
    }

    if (flock->parsed()) {
      const io::SceneFile file = io::load_scene(scene_path);
      for (const std::string& w : file.warnings) err << "warning: " << w << "\n";
      if (!file.flock) throw InputError("scene has no flock block");
      StepParams params;
      params.max_iters = flock_iters;
      const StepTrace trace = flock_iterate(file.scene, *file.flock, params);
      print_status(out, trace);
      const double before = x_spread(*file.flock, file.scene);
      const double after = x_spread(*file.flock, trace.final_scene);
      out << "x spread: " << before << " -> " << after << "\n";
      if (!trace_path.empty()) {
        const Objective objective =
            make_objective(file.scene, LeaderXGoal{file.flock->robots[file.flock->leader].body});
        io::write_text(trace_path,
                       io::serialize_trace(file.scene, trace, {"flock", objective, params}, file.flock));
      }
      if (!svg_path.empty()) io::render_svg(file.scene, trace.final_scene, svg_path);
      return step_failed(trace.status) ? kExitAnalysis : kExitOk;
    }

    if (bench->parsed()) {
      bool failed = false;
      out << std::setw(6) << "n" << std::setw(8) << "grid" << std::setw(14) << "jacobian" << std::setw(7) << "iters"
          << std::setw(11) << "status" << std::setw(11) << "assemble" << std::setw(11) << "solve" << std::setw(11)
          << "search" << std::setw(11) << "total" << "\n";
      for (int n : sizes) {
        const auto [rows, cols] = structures::grid_shape(n);
        const Scene s = structures::jigsaw_grid(rows, cols, gap, epsilon);
        const Objective objective = make_objective(s, DirectionGoal{{1.0, 0.0}, {}});
        const auto t0 = std::chrono::steady_clock::now();
        const StepTrace trace = flex_iterate(s, objective, step_flags.params());
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed = failed || step_failed(trace.status);
        std::ostringstream grid, jac;
        grid << rows << "x" << cols;
        jac << trace.jacobian_rows << "x" << trace.jacobian_cols;
        out << std::setw(6) << n << std::setw(8) << grid.str() << std::setw(14) << jac.str() << std::setw(7)
            << trace.iterations.size() << std::setw(11) << to_string(trace.status) << std::fixed
            << std::setprecision(3) << std::setw(11) << trace.seconds.assemble << std::setw(11) << trace.seconds.solve
            << std::setw(11) << trace.seconds.line_search << std::setw(11) << total << std::defaultfloat << "\n";
      }
      return failed ? kExitAnalysis : kExitOk;
    }
  } catch (const PenetrationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "analysis failed: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return kExitInput;
}

}  // namespace flexlp::cli
