#include "mospline/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "mospline/service.hpp"

namespace mospline {

using nlohmann::json;

namespace {

constexpr std::string_view kFixturePrefix = "fixture:";

struct CliFailure {
  int exit_code;
  std::string code;
  std::string message;
  std::string path;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure{kExitInvalidInput, "io-error", "cannot read '" + path + "'", ""};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CliFailure{kExitInvalidInput, "io-error", "cannot write '" + path + "'", ""};
  f << bytes;
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw CliFailure{kExitUsage, "usage", std::string("cannot parse ") + what + " '" + text + "'", ""};
    }
    out.push_back(x);
  }
  return out;
}

FixtureParams parse_params(const std::vector<std::string>& kvs) {
  FixtureParams p;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CliFailure{kExitUsage, "usage", "--param expects key=value, got '" + kv + "'", ""};
    p[kv.substr(0, eq)] = parse_numbers(kv.substr(eq + 1), "parameter value").at(0);
  }
  return p;
}

std::variant<MovingCurve, MovingSurface> build(const ModelDocument& doc) {
  if (doc.is_curve()) return MovingCurve(doc.curve());
  return MovingSurface(doc.surface());
}

std::string error_line(const std::string& code, const std::string& message, const std::string& path,
                       const json& diagnostics = nullptr) {
  json j = {{"error", code}, {"message", message}};
  if (!path.empty()) j["path"] = path;
  if (!diagnostics.is_null()) j["diagnostics"] = diagnostics;
  return j.dump() + "\n";
}

}  // namespace

void configure_logging_from_env() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_logger_mt("mospline");
    spdlog::set_default_logger(logger);
  });
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("MOSPLINE_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

ModelDocument load_model_source(const std::string& source) {
  if (source.rfind(kFixturePrefix, 0) == 0) {
    return make_fixture_spec(std::string_view(source).substr(kFixturePrefix.size()));
  }
  return parse_model(read_file(source));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging_from_env();

  CLI::App app{"Moving B-spline curves and surfaces", "mospline"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string model_src, at, output, res, name;
  int density = 32;
  bool overlay = false;
  std::vector<std::string> params;
  ServiceOptions svc;
  std::string data_dir, static_dir;

  auto* eval = app.add_subcommand("eval", "Evaluate a point: --at t (curve) or --at s,t (surface)");
  eval->add_option("model", model_src, "Model file or fixture:<name>")->required();
  eval->add_option("--at", at, "Parameter value(s)")->required()->allow_extra_args(false);

  auto* classify = app.add_subcommand("classify", "Print the curve feature report as JSON");
  classify->add_option("model", model_src, "Model file or fixture:<name>")->required();

  auto* validate = app.add_subcommand("validate", "Print validation diagnostics as JSON");
  validate->add_option("model", model_src, "Model file or fixture:<name>")->required();

  auto* tess = app.add_subcommand("tessellate", "Write a polyline (curve) or quad mesh (surface) as JSON");
  tess->add_option("model", model_src, "Model file or fixture:<name>")->required();
  tess->add_option("--density", density, "Curve samples per node gap")->check(CLI::Range(2, 1 << 20));
  tess->add_option("--res", res, "Surface resolution res_s,res_t");
  tess->add_option("-o,--output", output, "Output path (default stdout)");

  auto* svg = app.add_subcommand("export-svg", "Export a curve as SVG");
  svg->add_option("model", model_src, "Model file or fixture:<name>")->required();
  svg->add_option("-o,--output", output, "Output path")->required();
  svg->add_option("--density", density, "Samples per node gap")->check(CLI::Range(2, 1 << 20));
  svg->add_flag("--overlay", overlay, "Draw the control polygon and node markers");

  auto* obj = app.add_subcommand("export-obj", "Export a surface as Wavefront OBJ");
  obj->add_option("model", model_src, "Model file or fixture:<name>")->required();
  obj->add_option("-o,--output", output, "Output path")->required();
  obj->add_option("--res", res, "Resolution res_s,res_t (default 32,32)");

  auto* fixture = app.add_subcommand("fixture", "Write a built-in model document");
  fixture->add_option("name", name, "Fixture name")->required();
  fixture->add_option("--param", params, "Fixture parameter key=value (repeatable)");
  fixture->add_option("-o,--output", output, "Output path (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", svc.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", svc.host, "Bind address");
  serve->add_option("--data-dir", data_dir, "Snapshot directory");
  serve->add_option("--static-dir", static_dir, "Editor bundle served at /");

  auto* schema = app.add_subcommand("schema", "Print the model JSON schema");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_line("usage", e.what(), "");
    return kExitUsage;
  }

  auto surface_res = [&]() -> std::pair<int, int> {
    if (res.empty()) return {32, 32};
    auto v = parse_numbers(res, "--res");
    if (v.size() != 2 || v[0] < 2 || v[1] < 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
      throw CliFailure{kExitUsage, "usage", "--res expects two integers >= 2, e.g. 32,32", ""};
    }
    return {static_cast<int>(v[0]), static_cast<int>(v[1])};
  };

  try {
    if (*schema) {
      out << model_schema();
      return kExitOk;
    }
    if (*fixture) {
      write_output(output, serialize_model(make_fixture(name, parse_params(params))), out);
      return kExitOk;
    }
    if (*serve) {
      if (!data_dir.empty()) svc.data_dir = data_dir;
      if (!static_dir.empty()) svc.static_dir = static_dir;
      Service service(svc);
      if (!service.run()) {
        err << error_line("io-error", "cannot listen on " + svc.host + ":" + std::to_string(svc.port), "");
        return kExitUsage;
      }
      return kExitOk;
    }
    if (*validate) {
      ModelDocument doc;
      try {
        doc = load_model_source(model_src);
      } catch (const ParseError& e) {
        if (e.diagnostics().empty()) throw;
        out << canonical_json({{"valid", false}, {"diagnostics", to_json(e.diagnostics())}});
        return kExitInvalidInput;
      }
      out << canonical_json({{"valid", true}, {"diagnostics", to_json(validate_model(doc))}});
      return kExitOk;
    }

    const ModelDocument doc = load_model_source(model_src);
    const auto model = build(doc);
    const auto* curve = std::get_if<MovingCurve>(&model);
    const auto* surface = std::get_if<MovingSurface>(&model);

    if (*eval) {
      const auto v = parse_numbers(at, "--at");
      if (curve) {
        if (v.size() != 1) throw CliFailure{kExitUsage, "usage", "curves take one parameter: --at t", ""};
        out << canonical_json({{"params", v}, {"point", point_to_json(curve->eval(v[0]), curve->dimension())}});
      } else {
        if (v.size() != 2) throw CliFailure{kExitUsage, "usage", "surfaces take two parameters: --at s,t", ""};
        out << canonical_json({{"params", v}, {"point", point_to_json(surface->eval(v[0], v[1]), 3)}});
      }
      return kExitOk;
    }
    if (*classify) {
      if (!curve) throw CliFailure{kExitInvalidInput, "not-a-curve", "classify expects a curve model", ""};
      out << canonical_json(to_json(classify_features(*curve)));
      return kExitOk;
    }
    if (*tess) {
      const json j = curve ? to_json(tessellate_curve(*curve, density))
                           : [&] {
                               const auto [rs, rt] = surface_res();
                               return to_json(tessellate_surface(*surface, rs, rt));
                             }();
      write_output(output, canonical_json(j), out);
      return kExitOk;
    }
    if (*svg) {
      if (!curve) throw CliFailure{kExitInvalidInput, "not-a-curve", "export-svg expects a curve model", ""};
      const SvgOptions opt = overlay ? svg_overlay_for(*curve) : SvgOptions{};
      write_output(output, export_svg(tessellate_curve(*curve, density), opt), out);
      return kExitOk;
    }
    if (*obj) {
      if (!surface) throw CliFailure{kExitInvalidInput, "not-a-surface", "export-obj expects a surface model", ""};
      const auto [rs, rt] = surface_res();
      write_output(output, export_obj(tessellate_surface(*surface, rs, rt)), out);
      return kExitOk;
    }
  } catch (const CliFailure& f) {
    err << error_line(f.code, f.message, f.path);
    return f.exit_code;
  } catch (const ParseError& e) {
    err << error_line(e.code(), e.what(), e.path(), e.diagnostics().empty() ? json(nullptr) : to_json(e.diagnostics()));
    return kExitInvalidInput;
  } catch (const ValidationError& e) {
    err << error_line(e.code(), e.what(), "", to_json(e.diagnostics()));
    return kExitInvalidInput;
  } catch (const InvalidArgument& e) {
    const bool input = e.code() == "unknown-fixture" || e.code() == "unknown-parameter";
    err << error_line(e.code(), e.what(), "");
    return input ? kExitInvalidInput : kExitUsage;
  } catch (const Error& e) {
    err << error_line(e.code(), e.what(), "");
    return kExitEvaluation;
  }
  err << error_line("usage", "no subcommand", "");
  return kExitUsage;
}

}  // namespace mospline
