#include "plumbcalc/cli.hpp"

#include "plumbcalc/cubecx.hpp"
#include "plumbcalc/fixtures.hpp"
#include "plumbcalc/kecx.hpp"
#include "plumbcalc/upsilon.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace plumbcalc {

namespace {

using ojson = nlohmann::ordered_json;

struct RunConfig {
  std::string input;
  std::string spinc = "all";
  std::string t;
  long long t_grid = 6;
  std::optional<long long> box;
  long long window = 0;  // 0 keeps the built-in window formula
  std::string qmax = "8";
  std::string out;
  std::string format = "json";
  std::string vertex;
};

std::string dec12(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g",
                static_cast<double>(r.num()) / static_cast<double>(r.den()));
  return buf;
}

std::string input_stem(const std::string& input) {
  return std::filesystem::path(input).stem().string();
}

PlumbingGraph load_graph(const std::string& input) {
  std::error_code ec;
  if (std::filesystem::exists(input, ec)) return parse_plumbing_file(input);
  if (const Fixture* f = find_fixture(input_stem(input))) return parse_plumbing(f->text);
  throw ParseError("cannot read '" + input + "': no such file or fixture");
}

std::vector<SpincClass> select_classes(const IntersectionLattice& l, const std::string& spinc) {
  auto all = spinc_classes(l);
  if (spinc == "all") return all;
  size_t pos = 0;
  long long idx = -1;
  try {
    idx = std::stoll(spinc, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != spinc.size() || idx < 0 || idx >= static_cast<long long>(all.size()))
    throw InvalidParamsError("--spinc wants 'all' or a class index below " +
                             std::to_string(all.size()));
  return {all[static_cast<size_t>(idx)]};
}

// bounded per-class fan-out; futures joined in class order so reports are
// deterministic
template <typename F>
void for_each_class(size_t n, F&& fn) {
  size_t width = std::max<size_t>(1, std::thread::hardware_concurrency());
  for (size_t start = 0; start < n; start += width) {
    size_t stop = std::min(n, start + width);
    std::vector<std::future<void>> batch;
    for (size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (auto& f : batch) f.get();
  }
}

ojson breakpoints_json(const PiecewiseLinearFn& f) {
  ojson arr = ojson::array();
  for (const auto& [t, v] : f.breakpoints) arr.push_back(ojson::array({t.str(), v.str()}));
  return arr;
}

ojson barcode_json(const Barcode& b) {
  ojson arr = ojson::array();
  for (const auto& degree : b.degrees) {
    ojson bars = ojson::array();
    for (const auto& bar : degree) {
      ojson j;
      j["birth"] = bar.birth.str();
      j["length"] = bar.is_infinite ? ojson("inf") : ojson(bar.length.str());
      bars.push_back(std::move(j));
    }
    arr.push_back(std::move(bars));
  }
  return arr;
}

ojson rep_json(const IntVec& k) {
  ojson arr = ojson::array();
  for (int i = 0; i < k.size(); ++i) arr.push_back(k(i));
  return arr;
}

ojson provenance_json() {
  ojson p;
  p["engine"] = version_string();
  p["cell_budget"] = max_cells();
  return p;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw InvalidParamsError("cannot open '" + cfg.out + "' for writing");
  f << text;
}

int cmd_invariants(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg.input);
  auto l = lattice(g);
  auto classes = select_classes(l, cfg.spinc);
  std::string label =
      bad_vertices(g).size() <= 2 ? "Υ_{K,s}(t)" : "combinatorial Υ_Γ(t)";

  std::vector<ojson> rows(classes.size());
  for_each_class(classes.size(), [&](size_t i) {
    const auto& cls = classes[i];
    PiecewiseLinearFn f = upsilon(l, cls);
    Rational at_zero = f.value_at(Rational(0));
    Rational d = d_invariant(f);
    if (!(at_zero == d)) throw InternalError("upsilon(0) disagrees with d at serialization");
    ZemkeAuditReport z = zemke_audit(l, cls, f, 2);
    ojson c;
    c["class"] = cls.index;
    c["rep"] = rep_json(cls.rep);
    c["label"] = label;
    c["upsilon"] = breakpoints_json(f);
    c["tau"] = tau(f).str();
    c["d"] = d.str();
    ojson za;
    za["window_radius"] = 2;
    za["vectors_checked"] = z.vectors_checked;
    za["equality_everywhere"] = z.equality_everywhere;
    ojson entries = ojson::array();
    for (const auto& e : z.entries) {
      ojson je;
      je["t"] = e.t.str();
      je["best_bound"] = e.best_bound.str();
      je["equality"] = e.equality;
      entries.push_back(std::move(je));
    }
    za["breakpoints"] = std::move(entries);
    c["zemke_audit"] = std::move(za);
    rows[i] = std::move(c);
  });

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "class,t,upsilon,tau,d,t_exact,upsilon_exact\n";
    for (size_t i = 0; i < classes.size(); ++i) {
      const auto& bp = rows[i]["upsilon"];
      for (const auto& p : bp) {
        Rational t = Rational::parse(p[0].get<std::string>());
        Rational v = Rational::parse(p[1].get<std::string>());
        os << classes[i].index << "," << dec12(t) << "," << dec12(v) << ","
           << dec12(Rational::parse(rows[i]["tau"].get<std::string>())) << ","
           << dec12(Rational::parse(rows[i]["d"].get<std::string>())) << "," << t.str() << ","
           << v.str() << "\n";
      }
    }
    emit(cfg, out, os.str());
    return 0;
  }
  ojson root;
  root["input"] = input_stem(cfg.input);
  root["command"] = "invariants";
  ojson arr = ojson::array();
  for (auto& r : rows) arr.push_back(std::move(r));
  root["classes"] = std::move(arr);
  root["provenance"] = provenance_json();
  root["provenance"]["zemke_window_radius"] = 2;
  emit(cfg, out, root.dump(2) + "\n");
  return 0;
}

int cmd_homology(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg.input);
  auto l = lattice(g);
  TParam tp(Rational::parse(cfg.t));
  auto classes = select_classes(l, cfg.spinc);

  std::vector<ojson> rows(classes.size());
  for_each_class(classes.size(), [&](size_t i) {
    const auto& cls = classes[i];
    auto ctx = grading_context(l, cls.rep);
    auto cert = minimize_chi(ctx, tp);
    long long n0 = cfg.box ? *cfg.box : default_start_radius(cert);
    std::string note;
    if (n0 < 1) {
      // the free generator cannot live in an empty box; the guard raises the
      // box instead of reporting a missing free part
      note = "box " + std::to_string(n0) + " holds no edges; raised to 1";
      n0 = 1;
    }
    StabilizationResult sres = stabilize(l, cls, tp, n0);
    Barcode red = reduced_barcode(sres.barcode);
    Rational ups = upsilon_from_barcode(sres.barcode, ctx, tp);
    ojson c;
    c["class"] = cls.index;
    c["rep"] = rep_json(cls.rep);
    c["stabilized_box"] = sres.N;
    c["upsilon_from_barcode"] = ups.str();
    c["barcode"] = barcode_json(sres.barcode);
    c["reduced"] = barcode_json(red);
    if (!note.empty()) c["note"] = note;
    rows[i] = std::move(c);
  });

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "class,degree,infinite,birth,length,birth_exact,length_exact\n";
    for (size_t i = 0; i < classes.size(); ++i) {
      const auto& bc = rows[i]["barcode"];
      for (size_t deg = 0; deg < bc.size(); ++deg) {
        for (const auto& bar : bc[deg]) {
          Rational birth = Rational::parse(bar["birth"].get<std::string>());
          bool inf = bar["length"].is_string() && bar["length"] == "inf";
          os << classes[i].index << "," << deg << "," << (inf ? 1 : 0) << "," << dec12(birth)
             << ",";
          if (inf) {
            os << "," << birth.str() << ",";
          } else {
            Rational len = Rational::parse(bar["length"].get<std::string>());
            os << dec12(len) << "," << birth.str() << "," << len.str();
          }
          os << "\n";
        }
      }
    }
    emit(cfg, out, os.str());
    return 0;
  }
  ojson root;
  root["input"] = input_stem(cfg.input);
  root["command"] = "homology";
  root["t"] = Rational::parse(cfg.t).str();
  ojson arr = ojson::array();
  for (auto& r : rows) arr.push_back(std::move(r));
  root["classes"] = std::move(arr);
  root["provenance"] = provenance_json();
  emit(cfg, out, root.dump(2) + "\n");
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg.input);
  TParam tp(Rational::parse(cfg.t));
  Rational qm = Rational::parse(cfg.qmax);
  ExactnessReport rep = verify_exact(g, cfg.vertex, tp, cfg.window, qm);

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "check,pass,detail\n";
    for (const auto& c : rep.checks) {
      std::string detail = c.detail;
      std::replace(detail.begin(), detail.end(), ',', ';');
      os << c.name << "," << (c.pass ? "true" : "false") << "," << detail << "\n";
    }
    emit(cfg, out, os.str());
  } else {
    ojson root;
    root["fixture"] = input_stem(cfg.input);
    root["t"] = tp.t.str();
    root["window"] = cfg.window;
    ojson checks = ojson::array();
    for (const auto& c : rep.checks) {
      ojson jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["detail"] = c.detail;
      checks.push_back(std::move(jc));
    }
    root["checks"] = std::move(checks);
    emit(cfg, out, root.dump(2) + "\n");
  }
  return rep.all_pass() ? 0 : 5;
}

int cmd_plot(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg.input);
  auto l = lattice(g);
  if (cfg.t_grid < 1) throw InvalidParamsError("--t-grid wants a positive denominator");
  auto classes = select_classes(l, cfg.spinc);

  std::vector<PiecewiseLinearFn> fns(classes.size());
  for_each_class(classes.size(), [&](size_t i) { fns[i] = upsilon(l, classes[i]); });

  std::ostringstream os;
  os << "t,upsilon,class,t_exact,upsilon_exact\n";
  for (size_t i = 0; i < classes.size(); ++i) {
    std::set<Rational> ts;
    for (long long j = 0; j <= 2 * cfg.t_grid; ++j) ts.insert(Rational(j, cfg.t_grid));
    for (const auto& [t, v] : fns[i].breakpoints) ts.insert(t);
    for (const auto& t : ts) {
      Rational v = fns[i].value_at(t);
      os << dec12(t) << "," << dec12(v) << "," << classes[i].index << "," << t.str() << ","
         << v.str() << "\n";
    }
  }
  emit(cfg, out, os.str());
  return 0;
}

}  // namespace

std::string version_string() { return "plumbcalc 1.0.0"; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"graph knot concordance invariants from plumbing trees"};
  app.name("plumbcalc");
  app.require_subcommand(1);

  auto add_io = [&](CLI::App* sub, bool with_format = true) {
    sub->add_option("input", cfg.input, "plumbing file (or the name of a shipped fixture)")
        ->required();
    sub->add_option("--out", cfg.out, "write the report to this file instead of stdout");
    if (with_format)
      sub->add_option("--format", cfg.format, "json or csv")
          ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* inv = app.add_subcommand("invariants", "upsilon breakpoints, tau and d per class");
  add_io(inv);
  inv->add_option("--spinc", cfg.spinc, "'all' or one class index");

  CLI::App* hom = app.add_subcommand("homology", "stabilized barcodes of the cube complex");
  add_io(hom);
  hom->add_option("--spinc", cfg.spinc, "'all' or one class index");
  hom->add_option("--t", cfg.t, "deformation parameter, a rational in [0,2]")->required();
  long long box_arg = -1;
  CLI::Option* box_opt = hom->add_option("--box", box_arg, "starting box radius (stabilized upward)");

  CLI::App* ver = app.add_subcommand("verify", "surgery sequence checks at one vertex");
  add_io(ver);
  ver->add_option("--vertex", cfg.vertex, "framed vertex to remove and blow down")->required();
  ver->add_option("--t", cfg.t, "deformation parameter, a rational in [0,2]")->required();
  ver->add_option("--window", cfg.window, "absolute half-width for the K windows (0 = default)");
  ver->add_option("--qmax", cfg.qmax, "largest tracked q-exponent");

  CLI::App* plot = app.add_subcommand("plot", "CSV samples of upsilon for external plotting");
  add_io(plot, false);
  plot->add_option("--spinc", cfg.spinc, "'all' or one class index");
  plot->add_option("--t-grid", cfg.t_grid, "grid denominator; samples at j/denominator");

  std::string fixtures_action;
  CLI::App* fix = app.add_subcommand("fixtures", "operations on the shipped graph pack");
  fix->add_option("action", fixtures_action, "only 'list' is supported")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (box_opt->count() > 0) cfg.box = box_arg;
    if (inv->parsed()) return cmd_invariants(cfg, out);
    if (hom->parsed()) return cmd_homology(cfg, out);
    if (ver->parsed()) return cmd_verify(cfg, out);
    if (plot->parsed()) return cmd_plot(cfg, out);
    if (fix->parsed()) {
      if (fixtures_action != "list")
        throw InvalidParamsError("unknown fixtures action '" + fixtures_action + "'");
      std::ostringstream os;
      for (const auto& f : fixtures()) os << f.name << "  " << f.description << "\n";
      emit(cfg, out, os.str());
      return 0;
    }
    throw InternalError("no subcommand dispatched");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::parse:
      case Errc::validation:
      case Errc::invalid_params:
      case Errc::hypothesis:
      case Errc::missing_free_part:
        return 2;
      case Errc::not_negative_definite:
        return 3;
      case Errc::capacity:
        return 4;
      case Errc::exactness_failure:
        return 5;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace plumbcalc
