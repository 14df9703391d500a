#include "flexlp/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace flexlp::io {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

// Pretty printer that keeps numeric arrays (and arrays of them) on one line.
bool is_leaf_array(const ordered& v) {
  if (!v.is_array()) return false;
  return std::all_of(v.begin(), v.end(), [](const ordered& e) {
    return e.is_primitive() || (e.is_array() && std::all_of(e.begin(), e.end(), [](const ordered& x) { return x.is_primitive(); }));
  });
}

void pretty(const ordered& v, std::ostringstream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  if (v.is_object() && !v.empty()) {
    os << "{\n";
    std::size_t i = 0;
    for (const auto& [key, value] : v.items()) {
      os << pad << ordered(key).dump() << ": ";
      pretty(value, os, indent + 2);
      os << (++i < v.size() ? ",\n" : "\n");
    }
    os << std::string(static_cast<std::size_t>(indent), ' ') << "}";
  } else if (v.is_array() && !v.empty() && !is_leaf_array(v)) {
    os << "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << pad;
      pretty(v[i], os, indent + 2);
      os << (i + 1 < v.size() ? ",\n" : "\n");
    }
    os << std::string(static_cast<std::size_t>(indent), ' ') << "]";
  } else {
    os << v.dump();
  }
}

std::string pretty(const ordered& v) {
  std::ostringstream os;
  pretty(v, os, 0);
  os << "\n";
  return os.str();
}

std::string where(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) throw InputError("unknown field '" + where(path, key) + "'");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError("missing field '" + where(path, key) + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw InputError("'" + path + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError("'" + path + "' must be finite");
  return x;
}

Vec2 point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw InputError("'" + path + "' must be [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

ordered to_json(const Vec2& p) { return ordered::array({p.x(), p.y()}); }
ordered to_json(const Pose& p) { return ordered::array({p.x, p.y, p.theta}); }

std::string describe(const Vec2& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

FlockSpec parse_flock(const json& f, const Scene& scene) {
  const std::string path = "flock";
  if (!f.is_object()) throw InputError("'flock' must be an object");
  reject_unknown(f, path, {"leader", "neighbors", "rotation_cap", "leader_box", "clearance", "robots"});

  std::map<std::string, std::size_t> body_index;
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) body_index[scene.bodies[i].name] = i;
  const auto body_of = [&](const json& v, const std::string& p) {
    if (!v.is_string()) throw InputError("'" + p + "' must be a body name");
    const auto it = body_index.find(v.get<std::string>());
    if (it == body_index.end()) throw InputError("'" + p + "' names unknown body '" + v.get<std::string>() + "'");
    return it->second;
  };

  FlockSpec spec;
  if (f.contains("neighbors")) {
    if (!f["neighbors"].is_number_integer()) throw InputError("'flock.neighbors' must be an integer");
    spec.neighbors = f["neighbors"].get<int>();
  }
  if (f.contains("rotation_cap")) spec.rotation_cap = number(f["rotation_cap"], "flock.rotation_cap");
  if (f.contains("leader_box")) spec.leader_box = number(f["leader_box"], "flock.leader_box");
  if (f.contains("clearance")) spec.clearance = number(f["clearance"], "flock.clearance");

  const json& robots = require(f, path, "robots");
  if (!robots.is_array()) throw InputError("'flock.robots' must be an array");
  std::map<std::size_t, std::size_t> robot_of_body;
  std::vector<std::optional<std::size_t>> pred_body;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const json& r = robots[i];
    const std::string rp = "flock.robots[" + std::to_string(i) + "]";
    if (!r.is_object()) throw InputError("'" + rp + "' must be an object");
    reject_unknown(r, rp, {"body", "predecessor", "camera", "marker"});
    RobotSpec robot;
    robot.body = body_of(require(r, rp, "body"), rp + ".body");
    if (!robot_of_body.emplace(robot.body, i).second)
      throw InputError("'" + rp + ".body' repeats body '" + scene.bodies[robot.body].name + "'");
    if (r.contains("predecessor") && !r["predecessor"].is_null())
      pred_body.emplace_back(body_of(r["predecessor"], rp + ".predecessor"));
    else
      pred_body.emplace_back(std::nullopt);
    if (r.contains("camera")) {
      const json& c = r["camera"];
      const std::string cp = rp + ".camera";
      if (!c.is_object()) throw InputError("'" + cp + "' must be an object");
      reject_unknown(c, cp, {"apex", "forward", "half_angle"});
      if (c.contains("apex")) robot.camera.apex = point(c["apex"], cp + ".apex");
      if (c.contains("forward")) robot.camera.forward = point(c["forward"], cp + ".forward");
      if (c.contains("half_angle")) robot.camera.half_angle = number(c["half_angle"], cp + ".half_angle");
    }
    if (r.contains("marker")) robot.marker = point(r["marker"], rp + ".marker");
    spec.robots.push_back(robot);
  }
  for (std::size_t i = 0; i < spec.robots.size(); ++i) {
    if (!pred_body[i]) continue;
    const auto it = robot_of_body.find(*pred_body[i]);
    if (it == robot_of_body.end())
      throw InputError("predecessor '" + scene.bodies[*pred_body[i]].name + "' is not a robot");
    spec.robots[i].predecessor = it->second;
  }
  const std::size_t leader_body = body_of(require(f, path, "leader"), "flock.leader");
  const auto it = robot_of_body.find(leader_body);
  if (it == robot_of_body.end()) throw InputError("flock leader '" + scene.bodies[leader_body].name + "' is not a robot");
  spec.leader = it->second;
  validate_flock(spec, scene);
  return spec;
}

ordered flock_json(const FlockSpec& spec, const Scene& scene) {
  ordered robots = ordered::array();
  for (const RobotSpec& r : spec.robots) {
    ordered jr;
    jr["body"] = scene.bodies[r.body].name;
    jr["predecessor"] = r.predecessor ? ordered(scene.bodies[spec.robots[*r.predecessor].body].name) : ordered(nullptr);
    jr["camera"] = {{"apex", to_json(r.camera.apex)},
                    {"forward", to_json(r.camera.forward)},
                    {"half_angle", r.camera.half_angle}};
    jr["marker"] = to_json(r.marker);
    robots.push_back(jr);
  }
  return {{"leader", scene.bodies[spec.robots[spec.leader].body].name},
          {"neighbors", spec.neighbors},
          {"rotation_cap", spec.rotation_cap},
          {"leader_box", spec.leader_box},
          {"clearance", spec.clearance},
          {"robots", robots}};
}

ordered scene_json(const Scene& scene, const std::optional<FlockSpec>& flock) {
  ordered bodies = ordered::array();
  for (const Body& b : scene.bodies) {
    ordered verts = ordered::array();
    for (const Vec2& v : b.polygon.vertices()) verts.push_back(to_json(v));
    bodies.push_back({{"name", b.name}, {"fixed", b.fixed}, {"pose", to_json(b.pose)}, {"vertices", verts}});
  }
  ordered out = {{"version", kSceneVersion}, {"epsilon", scene.epsilon}};
  if (scene.bounds) out["bounds"] = {{"translation", scene.bounds->translation}, {"rotation", scene.bounds->rotation}};
  out["bodies"] = bodies;
  if (flock) out["flock"] = flock_json(*flock, scene);
  return out;
}

}  // namespace

SceneFile parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed scene file: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("scene file must hold a JSON object");
  reject_unknown(doc, "", {"version", "epsilon", "bodies", "bounds", "flock"});

  const json& version = require(doc, "", "version");
  if (!version.is_number_integer() || version.get<int>() != kSceneVersion)
    throw InputError("unsupported scene version (expected " + std::to_string(kSceneVersion) + ")");

  SceneFile out;
  Scene& scene = out.scene;
  if (doc.contains("epsilon")) scene.epsilon = number(doc["epsilon"], "epsilon");
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    if (!b.is_object()) throw InputError("'bounds' must be an object");
    reject_unknown(b, "bounds", {"translation", "rotation"});
    TrustRegion region;
    region.translation = number(require(b, "bounds", "translation"), "bounds.translation");
    region.rotation = number(require(b, "bounds", "rotation"), "bounds.rotation");
    if (region.translation < 0.0 || region.rotation < 0.0) throw InputError("bounds must be non-negative");
    scene.bounds = region;
  }

  const json& bodies = require(doc, "", "bodies");
  if (!bodies.is_array() || bodies.empty()) throw InputError("'bodies' must be a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const json& jb = bodies[i];
    const std::string bp = "bodies[" + std::to_string(i) + "]";
    if (!jb.is_object()) throw InputError("'" + bp + "' must be an object");
    reject_unknown(jb, bp, {"name", "vertices", "pose", "fixed"});
    const json& jn = require(jb, bp, "name");
    if (!jn.is_string() || jn.get<std::string>().empty()) throw InputError("'" + bp + ".name' must be a non-empty string");
    const std::string name = jn.get<std::string>();
    if (!names.insert(name).second) throw InputError("duplicate body name '" + name + "'");

    const json& jv = require(jb, bp, "vertices");
    if (!jv.is_array()) throw InputError("'" + bp + ".vertices' must be an array");
    std::vector<Vec2> verts;
    for (std::size_t k = 0; k < jv.size(); ++k) verts.push_back(point(jv[k], bp + ".vertices[" + std::to_string(k) + "]"));

    Pose pose;
    if (jb.contains("pose")) {
      const json& jp = jb["pose"];
      if (!jp.is_array() || jp.size() != 3) throw InputError("'" + bp + ".pose' must be [x, y, theta]");
      pose = {number(jp[0], bp + ".pose[0]"), number(jp[1], bp + ".pose[1]"), number(jp[2], bp + ".pose[2]")};
    }
    bool fixed = false;
    if (jb.contains("fixed")) {
      if (!jb["fixed"].is_boolean()) throw InputError("'" + bp + ".fixed' must be true or false");
      fixed = jb["fixed"].get<bool>();
    }

    try {
      Polygon polygon(std::move(verts));
      if (polygon.reversed_on_load())
        out.warnings.push_back("body '" + name + "' was clockwise; vertex order reversed");
      scene.bodies.push_back({name, std::move(polygon), pose, fixed});
    } catch (const GeometryError& e) {
      throw InputError("body '" + name + "': " + e.what());
    }
  }
  try {
    validate_scene(scene);
  } catch (const GeometryError& e) {
    throw InputError(e.what());
  }

  const Overlap worst = max_overlap(scene);
  if (worst.depth > kPenetrationTolerance) {
    const Body& inner = scene.bodies[worst.inner_body];
    std::ostringstream os;
    os << "initial penetration: vertex " << worst.inner_vertex << " of '" << inner.name << "' at "
       << describe(world_vertex(inner, worst.inner_vertex)) << " lies inside '"
       << scene.bodies[worst.outer_body].name << "'";
    if (std::isfinite(worst.depth)) os << " by " << worst.depth;
    throw PenetrationError(os.str(), worst.outer_body, worst.inner_body, worst.inner_vertex, worst.depth);
  }

  if (doc.contains("flock")) out.flock = parse_flock(doc["flock"], scene);
  return out;
}

SceneFile load_scene(const std::filesystem::path& path) { return parse_scene(read_text(path)); }

std::string serialize_scene(const Scene& scene, const std::optional<FlockSpec>& flock) {
  return pretty(scene_json(scene, flock));
}

std::string serialize_trace(const Scene& initial, const StepTrace& trace, const TraceInfo& info,
                            const std::optional<FlockSpec>& flock) {
  ordered iterations = ordered::array();
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const StepRecord& r = trace.iterations[i];
    ordered poses = ordered::array();
    for (const Pose& p : r.poses) poses.push_back(to_json(p));
    iterations.push_back({{"index", i},
                          {"lp_objective", r.lp_objective},
                          {"scale", r.scale},
                          {"gain", r.gain},
                          {"violation", r.violation},
                          {"poses", poses}});
  }
  ordered final_poses = ordered::array();
  for (const Body& b : trace.final_scene.bodies) final_poses.push_back(to_json(b.pose));

  const char* source = "direct";
  switch (info.objective.source) {
    case ObjectiveSource::direct:
      break;
    case ObjectiveSource::direction:
      source = "direction";
      break;
    case ObjectiveSource::radial:
      source = "radial";
      break;
    case ObjectiveSource::leader_x:
      source = "leader_x";
      break;
  }
  std::vector<double> weights(info.objective.weights.data(),
                              info.objective.weights.data() + info.objective.weights.size());
  ordered doc = {{"version", kTraceVersion},
              {"command", info.command},
              {"scene", scene_json(initial, flock)},
              {"objective", {{"source", source}, {"weights", weights}}},
              {"params",
               {{"eta", info.params.eta},
                {"max_iters", info.params.max_iters},
                {"scales", info.params.scales},
                {"gain_tolerance", info.params.gain_tolerance}}},
              {"jacobian", {{"rows", trace.jacobian_rows}, {"cols", trace.jacobian_cols}}},
              {"iterations", iterations},
              {"status", to_string(trace.status)},
              {"cumulative_objective", trace.cumulative_objective()},
              {"final_poses", final_poses},
              {"timing",
               {{"assemble", trace.seconds.assemble},
                {"solve", trace.seconds.solve},
                {"line_search", trace.seconds.line_search}}}};
  return pretty(doc);
}

std::string svg_document(const Scene& before, const Scene& after) {
  if (before.bodies.empty()) throw InputError("cannot render an empty scene");
  if (before.bodies.size() != after.bodies.size()) throw InputError("scenes to render have different bodies");

  Box2 box;
  for (const Scene* s : {&before, &after})
    for (const Body& b : s->bodies) box.extend(world_bounds(b));
  const double size = std::max(box.sizes().maxCoeff(), 1e-9);
  const double pad = 0.05 * size;
  const double stroke = 0.004 * size;

  std::ostringstream os;
  os.precision(10);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << box.min().x() - pad << " " << -box.max().y() - pad
     << " " << box.sizes().x() + 2 * pad << " " << box.sizes().y() + 2 * pad << "\" width=\"800\">\n";
  os << "<g transform=\"scale(1,-1)\">\n";
  const auto polygon = [&](const Body& b, const char* style) {
    os << "<polygon points=\"";
    const std::vector<Vec2> pts = world_vertices(b);
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << pts[i].x() << "," << pts[i].y();
    os << "\" " << style << "/>\n";
  };
  const std::string gray = "fill=\"#b0b0b0\" stroke=\"#606060\" stroke-width=\"" + std::to_string(stroke) + "\"";
  const std::string red = "fill=\"none\" stroke=\"#d01010\" stroke-width=\"" + std::to_string(stroke) + "\"";
  for (const Body& b : after.bodies) polygon(b, gray.c_str());
  for (const Body& b : before.bodies) polygon(b, red.c_str());
  os << "</g>\n</svg>\n";
  return os.str();
}

void render_svg(const Scene& before, const Scene& after, const std::filesystem::path& path) {
  write_text(path, svg_document(before, after));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace flexlp::io
