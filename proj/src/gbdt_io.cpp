#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flpxr/csv.hpp"
#include "flpxr/error.hpp"
#include "flpxr/gbdt.hpp"

namespace flpxr {

namespace {

constexpr const char* kMagic = "FLPXR-MODEL";
constexpr int kVersion = 1;

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(v[i]);
  }
  return out;
}

void write_tree(std::ostream& out, const Tree& tree) {
  out << "TREE " << tree.nodes.size() << '\n';
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const TreeNode& n = tree.nodes[id];
    if (n.is_leaf) {
      out << id << " leaf -1 0 0 -1 -1 " << csv::format_double(n.value)
          << '\n';
    } else {
      out << id << " split " << n.feature << ' '
          << csv::format_double(n.threshold) << ' ' << (n.default_left ? 1 : 0)
          << ' ' << n.left << ' ' << n.right << " 0\n";
    }
  }
}

void write_ensemble(std::ostream& out, const char* name, const Ensemble& e) {
  out << "TREES " << name << ' ' << e.trees.size() << '\n';
  for (const Tree& tree : e.trees) write_tree(out, tree);
}

// Line-oriented reader that tracks the section being parsed so errors
// can name it.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void section(const char* name) { section_ = name; }

  std::string line() {
    std::string ln;
    if (!std::getline(in_, ln)) {
      throw FormatError(section_, "unexpected end of file");
    }
    if (!ln.empty() && ln.back() == '\r') ln.pop_back();
    return ln;
  }

  std::vector<std::string> tokens() {
    std::istringstream ss(line());
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw FormatError(section_, what);
  }

  long to_int(const std::string& s) {
    const auto v = csv::parse_int(s);
    if (!v) fail("expected integer, got '" + s + "'");
    return static_cast<long>(*v);
  }

  double to_double(const std::string& s) {
    const auto v = csv::parse_double(s);
    if (!v) fail("expected number, got '" + s + "'");
    return *v;
  }

 private:
  std::istream& in_;
  std::string section_ = "magic";
};

Tree read_tree(Reader& r) {
  auto head = r.tokens();
  if (head.size() != 2 || head[0] != "TREE") r.fail("expected TREE header");
  const long n_nodes = r.to_int(head[1]);
  if (n_nodes <= 0) r.fail("tree must have at least one node");

  Tree tree;
  tree.nodes.resize(static_cast<std::size_t>(n_nodes));
  for (long i = 0; i < n_nodes; ++i) {
    auto toks = r.tokens();
    if (toks.size() != 8) r.fail("expected 8 node fields");
    const long id = r.to_int(toks[0]);
    if (id != i) r.fail("node ids must be dense and in order");
    TreeNode node;
    if (toks[1] == "leaf") {
      node.is_leaf = true;
      node.value = r.to_double(toks[7]);
    } else if (toks[1] == "split") {
      node.is_leaf = false;
      node.feature = static_cast<std::int32_t>(r.to_int(toks[2]));
      node.threshold = r.to_double(toks[3]);
      node.default_left = r.to_int(toks[4]) != 0;
      node.left = static_cast<std::int32_t>(r.to_int(toks[5]));
      node.right = static_cast<std::int32_t>(r.to_int(toks[6]));
      if (node.left <= 0 || node.right <= 0 || node.left >= n_nodes ||
          node.right >= n_nodes) {
        r.fail("child id out of range");
      }
      if (node.feature < 0) r.fail("split feature out of range");
    } else {
      r.fail("unknown node kind '" + toks[1] + "'");
    }
    tree.nodes[static_cast<std::size_t>(id)] = node;
  }
  return tree;
}

std::vector<int> read_int_list_line(Reader& r, std::size_t count) {
  auto toks = r.tokens();
  if (toks.size() != count) r.fail("category list length mismatch");
  std::vector<int> out;
  out.reserve(count);
  for (const auto& t : toks) out.push_back(static_cast<int>(r.to_int(t)));
  return out;
}

}  // namespace

void save_model(const GbdtModel& model, std::ostream& out) {
  out << kMagic << '\n';
  out << "VERSION " << kVersion << '\n';

  std::vector<std::pair<std::string, std::string>> params = {
      {"n_estimators", std::to_string(model.params.n_estimators)},
      {"learning_rate", csv::format_double(model.params.learning_rate)},
      {"max_depth", std::to_string(model.params.max_depth)},
      {"n_bins", std::to_string(model.params.n_bins)},
      {"lambda", csv::format_double(model.params.lambda)},
      {"gamma", csv::format_double(model.params.gamma)},
      {"min_child_weight", csv::format_double(model.params.min_child_weight)},
      {"rate_s", std::to_string(model.rate_s)},
      {"horizons", join_ints(model.horizons)},
  };
  out << "PARAMS " << params.size() << '\n';
  for (const auto& [k, v] : params) out << k << '=' << v << '\n';

  out << "FEATURES " << model.feature_names.size() << '\n';
  for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
    out << (i ? " " : "") << model.feature_names[i];
  }
  out << '\n';

  out << "CATEGORIES\n";
  const auto& vt = model.encoder.vessel_type_vocab();
  out << "vessel_type " << vt.size() << '\n';
  for (std::size_t i = 0; i < vt.size(); ++i) {
    out << (i ? " " : "") << vt[i];
  }
  out << '\n';
  const auto& ov = model.encoder.origin_vocab();
  out << "origin " << ov.size() << '\n';
  for (std::size_t i = 0; i < ov.size(); ++i) out << (i ? " " : "") << ov[i];
  out << '\n';

  out << "BASE_SCORES " << csv::format_double(model.lon.base_score) << ' '
      << csv::format_double(model.lat.base_score) << '\n';

  write_ensemble(out, "lon", model.lon);
  write_ensemble(out, "lat", model.lat);
  out << "END\n";
  if (!out) throw IoError("failed to write model");
}

GbdtModel load_model(std::istream& in) {
  if (!in) throw IoError("model source is not readable");
  Reader r(in);

  r.section("magic");
  if (r.line() != kMagic) r.fail("bad magic; not a model file");

  r.section("version");
  {
    auto toks = r.tokens();
    if (toks.size() != 2 || toks[0] != "VERSION") r.fail("expected VERSION");
    const long v = r.to_int(toks[1]);
    if (v != kVersion) {
      r.fail("unsupported model version " + toks[1] + " (expected " +
             std::to_string(kVersion) + ")");
    }
  }

  GbdtModel model;
  r.section("params");
  {
    auto toks = r.tokens();
    if (toks.size() != 2 || toks[0] != "PARAMS") r.fail("expected PARAMS");
    const long count = r.to_int(toks[1]);
    for (long i = 0; i < count; ++i) {
      const std::string ln = r.line();
      const auto eq = ln.find('=');
      if (eq == std::string::npos) r.fail("expected key=value");
      const std::string key = ln.substr(0, eq);
      const std::string val = ln.substr(eq + 1);
      if (key == "n_estimators") {
        model.params.n_estimators = static_cast<int>(r.to_int(val));
      } else if (key == "learning_rate") {
        model.params.learning_rate = r.to_double(val);
      } else if (key == "max_depth") {
        model.params.max_depth = static_cast<int>(r.to_int(val));
      } else if (key == "n_bins") {
        model.params.n_bins = static_cast<int>(r.to_int(val));
      } else if (key == "lambda") {
        model.params.lambda = r.to_double(val);
      } else if (key == "gamma") {
        model.params.gamma = r.to_double(val);
      } else if (key == "min_child_weight") {
        model.params.min_child_weight = r.to_double(val);
      } else if (key == "rate_s") {
        model.rate_s = r.to_int(val);
      } else if (key == "horizons") {
        model.horizons.clear();
        std::vector<std::string> parts;
        csv::split_line(val, parts);
        for (const auto& p : parts) {
          model.horizons.push_back(static_cast<int>(r.to_int(p)));
        }
      } else {
        r.fail("unknown param '" + key + "'");
      }
    }
  }

  r.section("features");
  {
    auto toks = r.tokens();
    if (toks.size() != 2 || toks[0] != "FEATURES") r.fail("expected FEATURES");
    const long count = r.to_int(toks[1]);
    auto names = r.tokens();
    if (static_cast<long>(names.size()) != count) {
      r.fail("feature name count mismatch");
    }
    model.feature_names = std::move(names);
  }

  r.section("categories");
  {
    if (r.line() != "CATEGORIES") r.fail("expected CATEGORIES");
    auto vt_head = r.tokens();
    if (vt_head.size() != 2 || vt_head[0] != "vessel_type") {
      r.fail("expected vessel_type block");
    }
    auto vt = read_int_list_line(r, static_cast<std::size_t>(r.to_int(vt_head[1])));
    auto ov_head = r.tokens();
    if (ov_head.size() != 2 || ov_head[0] != "origin") {
      r.fail("expected origin block");
    }
    auto ov = read_int_list_line(r, static_cast<std::size_t>(r.to_int(ov_head[1])));
    model.encoder = CategoryEncoder(std::move(vt), std::move(ov));
  }

  r.section("base_scores");
  {
    auto toks = r.tokens();
    if (toks.size() != 3 || toks[0] != "BASE_SCORES") {
      r.fail("expected BASE_SCORES");
    }
    model.lon.base_score = r.to_double(toks[1]);
    model.lat.base_score = r.to_double(toks[2]);
  }

  for (const char* target : {"lon", "lat"}) {
    r.section(target == std::string("lon") ? "trees_lon" : "trees_lat");
    auto head = r.tokens();
    if (head.size() != 3 || head[0] != "TREES" || head[1] != target) {
      r.fail(std::string("expected TREES ") + target);
    }
    const long count = r.to_int(head[2]);
    Ensemble& e = target == std::string("lon") ? model.lon : model.lat;
    e.trees.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) e.trees.push_back(read_tree(r));
  }

  r.section("end");
  if (r.line() != "END") r.fail("expected END");

  r.section("model");
  if (model.lon.trees.size() != model.lat.trees.size()) {
    r.fail("tree counts differ between targets");
  }
  if (static_cast<long>(model.lon.trees.size()) != model.params.n_estimators) {
    r.fail("tree count does not match n_estimators");
  }
  for (const Ensemble* e : {&model.lon, &model.lat}) {
    for (const Tree& tree : e->trees) {
      for (const TreeNode& n : tree.nodes) {
        if (!n.is_leaf &&
            n.feature >= static_cast<std::int32_t>(model.feature_names.size())) {
          r.fail("split feature exceeds feature count");
        }
      }
    }
  }
  return model;
}

void save_model_file(const GbdtModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  save_model(model, out);
  out.flush();
  if (!out) throw IoError("failed writing model file: " + path);
}

GbdtModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  return load_model(in);
}

std::uint64_t model_size_bytes(const GbdtModel& model) {
  std::ostringstream ss;
  save_model(model, ss);
  return static_cast<std::uint64_t>(ss.str().size());
}

}  // namespace flpxr
