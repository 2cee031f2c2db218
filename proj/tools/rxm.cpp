// rxm: run the maintenance workflow on a CSV file.

#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rxm/core/error.hpp"
#include "rxm/optimization/optimization.hpp"
#include "rxm/orchestration/runner.hpp"

namespace {

using namespace rxm;
using namespace rxm::orchestration;

std::unique_ptr<Backend> make_backend(const std::string& spec, const std::string& url) {
  if (spec == "rule" || spec == "none") return nullptr;
  if (spec.rfind("scripted:", 0) == 0) {
    return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(spec.substr(9)));
  }
  if (spec == "http") return std::make_unique<GenerateHttpBackend>(url);
  if (spec == "chat") return std::make_unique<ChatHttpBackend>(url);
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown backend '{}' (rule, scripted:<file>, http, chat)", spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prescriptive-maintenance workflow over a tabular CSV"};
  RunConfig config;
  std::string data, task = "auto", target, backend = "rule", backend_url = "http://127.0.0.1:11434";
  std::string contamination = "auto", slm_backend = "none", slm_url = "http://127.0.0.1:11434";
  std::string log_dir = "logs";
  std::size_t max_steps = config.trigger.max_steps;
  bool quiet = false;

  app.add_option("--data", data, "CSV file")->required();
  app.add_option("--task", task, "auto, classification, regression or anomaly")
      ->check(CLI::IsMember({"auto", "classification", "regression", "anomaly", "anomaly_detection"}));
  app.add_option("--target", target, "Target column");
  app.add_option("--backend", backend, "Planner backend: rule, scripted:<file>, http or chat");
  app.add_option("--backend-url", backend_url, "Base URL of the planner backend");
  app.add_option("--model-name", config.model_name, "Planner model name");
  app.add_option("--slm-backend", slm_backend, "Advisory backend: none, scripted:<file>, http or chat");
  app.add_option("--slm-url", slm_url, "Base URL of the advisory backend");
  app.add_option("--slm-model", config.slm_model_name, "Advisory model name");
  app.add_option("--contamination", contamination, "Anomaly fraction in (0, 0.5], or auto");
  app.add_option("--seed", config.seed, "Random seed");
  app.add_option("--goal", config.goal, "Goal text given to the planner");
  app.add_flag("--auto-approve", config.auto_approve, "Approve recommendations without prompting");
  app.add_option("--max-steps", max_steps, "Planner step budget")->check(CLI::PositiveNumber);
  app.add_flag("--include-routine", config.recommend.include_routine, "Keep Routine recommendations");
  app.add_option("--log-dir", log_dir, "Directory for the audit log and JSON artifacts");
  app.add_flag("-q,--quiet", quiet, "Suppress log lines on stderr");
  CLI11_PARSE(app, argc, argv);

  try {
    config.data_path = data;
    config.log_dir = log_dir;
    config.trigger.max_steps = max_steps;
    if (task != "auto") config.task = analytics::parse_task(task);
    if (!target.empty()) config.target = target;
    if (contamination != "auto") {
      double q = 0.0;
      try {
        q = std::stod(contamination);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "--contamination must be a number or 'auto'");
      }
      if (!(q > 0.0 && q <= 0.5)) throw Error(ErrorCode::kInvalidArgument, "--contamination must be in (0, 0.5]");
      config.contamination = q;
    }
    auto planner = make_backend(backend, backend_url);
    auto slm = make_backend(slm_backend, slm_url);

    RunIo io;
    io.in = &std::cin;
    io.out = &std::cout;
    io.log = quiet ? nullptr : &std::cerr;
    const RunResult result = run_workflow(config, planner.get(), io, slm.get());
    if (result.failure) std::cerr << "error: " << *result.failure << '\n';
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  }
}
