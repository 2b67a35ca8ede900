// dgpc command-line front end.
#include <CLI11.hpp>
#include <iostream>

#include "dgpc/cli_io.hpp"
#include "dgpc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dynamical generalized polynomial chaos for SDEs"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a JSON configuration");
  run->add_option("config", config_path, "configuration file")->required();

  std::string name, out_dir = "results", preset_dir;
  auto* exp = app.add_subcommand("experiment", "Reproduce a shipped example (ex1..ex7)");
  exp->add_option("name", name, "preset name")->required();
  exp->add_option("-o,--out", out_dir, "output directory");
  exp->add_option("--preset-dir", preset_dir, "directory holding the preset files");

  std::string a_path, b_path, cmp_out;
  auto* cmp = app.add_subcommand("compare", "Relative errors of run A against run B");
  cmp->add_option("configA", a_path)->required();
  cmp->add_option("configB", b_path)->required();
  cmp->add_option("-o,--out", cmp_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      dgpc::run_config(dgpc::load_config(config_path), std::cout);
    } else if (*exp) {
      const auto dir = preset_dir.empty() ? dgpc::default_preset_dir() : std::filesystem::path(preset_dir);
      std::cout << dgpc::run_experiment(name, std::filesystem::path(out_dir) / name, dir);
    } else if (*cmp) {
      const auto t = dgpc::compare_configs(dgpc::load_config(a_path), dgpc::load_config(b_path));
      if (cmp_out.empty()) {
        dgpc::write_csv(t, std::cout);
      } else {
        dgpc::emit_csv(t, cmp_out);
      }
    }
  } catch (const dgpc::Error& e) {
    std::cerr << "error: " << dgpc::category_name(e.category()) << ": " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
