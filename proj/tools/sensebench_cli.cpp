// Command-line front end for the sense-disambiguation toolkit: inspect
// lexicons, render prompts, write model definitions, run evaluations and
// summarize reports/spend.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sensebench/http_provider.hpp"
#include "sensebench/sensebench.hpp"

namespace fs = std::filesystem;
using namespace sensebench;

namespace {

fs::path resource_dir() {
#ifdef SENSEBENCH_RESOURCE_DIR
  return fs::path(SENSEBENCH_RESOURCE_DIR);
#else
  return fs::path("resources");
#endif
}

// Crude size-based token estimate for dry-run cost projections.
std::int64_t estimate_tokens(const std::string& text) {
  return static_cast<std::int64_t>(text.size() / 4 + 1);
}

struct MockSpec {
  enum class Kind { none, oracle, fixed };
  Kind kind = Kind::none;
  std::string reply;  // for Kind::fixed
};

// Accepted model forms: `provider:model`, `mock:oracle`,
// `mock:fixed:<reply>`, `mock:file:<path with reply text>`.
MockSpec parse_mock(const std::string& model_arg) {
  MockSpec spec;
  if (!model_arg.starts_with("mock:")) return spec;
  const std::string rest = model_arg.substr(5);
  if (rest == "oracle") {
    spec.kind = MockSpec::Kind::oracle;
  } else if (rest.starts_with("fixed:")) {
    spec.kind = MockSpec::Kind::fixed;
    spec.reply = rest.substr(6);
  } else if (rest.starts_with("file:")) {
    spec.kind = MockSpec::Kind::fixed;
    spec.reply = detail::read_file(fs::path(rest.substr(5)));
    if (!spec.reply.empty() && spec.reply.back() == '\n') spec.reply.pop_back();
  } else {
    throw ConfigError("unknown mock form '" + model_arg +
                      "' (use mock:oracle, mock:fixed:<reply> or mock:file:<path>)");
  }
  return spec;
}

struct GatewayOptions {
  std::string model_arg;
  fs::path providers_path;
  fs::path prices_path;
  std::optional<fs::path> cache_dir;
  std::optional<fs::path> ledger_path;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::int64_t mock_prompt_tokens = 0;
  std::int64_t mock_completion_tokens = 0;
};

struct GatewaySetup {
  CompletionGateway gateway;
  ModelRef model;
  MockSpec mock_spec;
  std::shared_ptr<MockProvider> mock;  // set when the mock provider is used
};

std::unique_ptr<GatewaySetup> make_gateway(const GatewayOptions& options) {
  auto setup = std::make_unique<GatewaySetup>();
  setup->mock_spec = parse_mock(options.model_arg);
  if (setup->mock_spec.kind != MockSpec::Kind::none) {
    setup->model = ModelRef{"mock", "mock-model", {}};
    setup->mock = std::make_shared<MockProvider>("mock");
    if (setup->mock_spec.kind == MockSpec::Kind::fixed) {
      setup->mock->set_default_reply({setup->mock_spec.reply,
                                      options.mock_prompt_tokens,
                                      options.mock_completion_tokens});
    }
    setup->gateway.register_provider(setup->mock);
  } else {
    setup->model = ModelRef::parse(options.model_arg);
    bool found = false;
    for (ProviderConfig& config : load_provider_configs(options.providers_path)) {
      if (config.options.name != setup->model.provider) continue;
      setup->gateway.register_provider(
          std::make_shared<HttpProvider>(std::move(config.options)), config.limits);
      found = true;
      break;
    }
    if (!found) {
      throw ConfigError("provider '" + setup->model.provider + "' not declared in " +
                        options.providers_path.string());
    }
  }
  setup->model.params.temperature = options.temperature;
  setup->model.params.max_output_tokens = options.max_output_tokens;
  setup->gateway.set_price_table(PriceTable::load(options.prices_path));
  if (options.cache_dir) setup->gateway.set_cache_dir(*options.cache_dir);
  if (options.ledger_path) setup->gateway.ledger().set_sink(*options.ledger_path);
  return setup;
}

void print_cost_summary(const CostLedger& ledger, std::ostream& out) {
  const CostTotals totals = ledger.totals();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", totals.dollars);
  out << "cost: $" << buf << " over " << totals.calls << " calls\n";
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string lexicon;
  std::vector<std::string> instance_files;
  std::string definitions;
  bool strict = false;
};

int cmd_ingest(const IngestArgs& args) {
  const SenseGraph graph = load_lexicon_file(args.lexicon, args.strict);
  std::map<std::string, int> lemmas;
  std::size_t with_pd = 0;
  for (const SenseId& id : graph.nodes()) {
    ++lemmas[id.lemma];
    if (graph.at(id).primary_descriptor) ++with_pd;
  }
  std::cout << "lexicon: " << graph.size() << " senses, " << lemmas.size()
            << " lemmas, " << with_pd << " with primary descriptor\n";
  for (const std::string& file : args.instance_files) {
    const std::vector<Instance> instances = load_instances_file(file);
    std::size_t known_gold = 0;
    std::size_t gold_in_candidates = 0;
    for (const Instance& inst : instances) {
      if (graph.contains(inst.gold)) ++known_gold;
      for (const SenseId& c : inst.candidates) {
        if (c == inst.gold) {
          ++gold_in_candidates;
          break;
        }
      }
    }
    const std::size_t evaluable = filter_for_evaluation(instances).size();
    std::cout << "instances: " << instances.size() << " loaded, " << evaluable
              << " evaluable, " << gold_in_candidates << " with gold among candidates ("
              << file << ")\n";
    if (known_gold < instances.size()) {
      std::cout << "  note: " << (instances.size() - known_gold)
                << " gold senses missing from the lexicon\n";
    }
  }
  if (!args.definitions.empty()) {
    const DefinitionMap definitions = load_definitions_file(args.definitions);
    std::size_t model_written = 0;
    for (const auto& [sense, def] : definitions) {
      if (def.source.is_model) ++model_written;
    }
    std::cout << "definitions: " << definitions.size() << " (" << model_written
              << " model-written) from " << args.definitions << "\n";
  }
  return 0;
}

// -------------------------------------------------------------- neighbors

struct NeighborsArgs {
  std::string lexicon;
  std::string sense;
  int max_neighbors = 4;
  bool strict = false;
};

int cmd_neighbors(const NeighborsArgs& args) {
  const SenseGraph graph = load_lexicon_file(args.lexicon, args.strict);
  const SenseId sense = SenseId::parse(args.sense);
  if (!graph.contains(sense)) {
    std::cerr << "error: sense '" << sense.str() << "' is not in the lexicon\n";
    return 2;
  }
  for (const std::string& lemma : neighborhood(graph, sense, args.max_neighbors)) {
    std::cout << lemma << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- prompt

struct PromptArgs {
  std::string lexicon;
  std::string instances;
  std::string instance_id;
  std::string mode = "neighborhood";
  std::string definitions;
  std::string templates_dir;
  int max_neighbors = 4;
  bool strict = false;
};

int cmd_prompt(const PromptArgs& args) {
  const SenseGraph graph = load_lexicon_file(args.lexicon, args.strict);
  const std::vector<Instance> instances = load_instances_file(args.instances);
  if (instances.empty()) throw DatasetError("no instances in " + args.instances);
  const Instance* instance = &instances.front();
  if (!args.instance_id.empty()) {
    instance = nullptr;
    for (const Instance& inst : instances) {
      if (inst.id == args.instance_id) {
        instance = &inst;
        break;
      }
    }
    if (!instance) {
      throw DatasetError("no instance with id '" + args.instance_id + "' in " +
                         args.instances);
    }
  }
  const PromptTemplates templates = PromptTemplates::load(args.templates_dir);
  const PromptMode mode = prompt_mode_from_string(args.mode);
  DefinitionMap definitions;
  if (!args.definitions.empty()) definitions = load_definitions_file(args.definitions);

  PromptBundle bundle;
  if (mode == PromptMode::write_definitions) {
    bundle = build_definition_writing_prompt(instance->lemma, instance->candidates,
                                             graph, templates, args.max_neighbors);
  } else {
    LlmWsdOptions options;
    options.mode = mode;
    options.max_neighbors = args.max_neighbors;
    bundle = build_wsd_prompt(*instance, graph, definitions, templates, options);
  }
  for (const std::string& warning : bundle.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  std::cout << "=== system ===\n" << bundle.system_text << "\n";
  std::cout << "=== user ===\n" << bundle.user_text << "\n";
  std::cout << "=== senses ===\n";
  for (std::size_t i = 0; i < bundle.sense_index.size(); ++i) {
    std::cout << (i + 1) << " -> " << bundle.sense_index[i].str() << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- define

struct DefineArgs {
  std::string lexicon;
  std::string instances;
  std::string model;
  std::string out;
  std::string errors_out;
  std::string templates_dir;
  std::string providers;
  std::string prices;
  std::string cache_dir;
  int max_neighbors = 4;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::int64_t mock_prompt_tokens = 0;
  std::int64_t mock_completion_tokens = 0;
  bool dry_run = false;
  bool strict = false;
};

int cmd_define(const DefineArgs& args) {
  const SenseGraph graph = load_lexicon_file(args.lexicon, args.strict);
  const std::vector<Instance> instances =
      filter_for_evaluation(load_instances_file(args.instances));
  const PromptTemplates templates = PromptTemplates::load(args.templates_dir);

  DefinitionMap existing;
  if (fs::exists(args.out)) existing = load_definitions_file(args.out);

  GatewayOptions gw_options;
  gw_options.model_arg = args.model;
  gw_options.providers_path = args.providers;
  gw_options.prices_path = args.prices;
  if (!args.cache_dir.empty()) gw_options.cache_dir = fs::path(args.cache_dir);
  gw_options.temperature = args.temperature;
  gw_options.max_output_tokens = args.max_output_tokens;
  gw_options.mock_prompt_tokens = args.mock_prompt_tokens;
  gw_options.mock_completion_tokens = args.mock_completion_tokens;
  const std::unique_ptr<GatewaySetup> setup = make_gateway(gw_options);
  if (setup->mock_spec.kind == MockSpec::Kind::oracle) {
    throw ConfigError("mock:oracle answers sense numbers; define needs "
                      "mock:fixed:<reply> or mock:file:<path>");
  }

  if (args.dry_run) {
    // Count the calls an actual run would make and project their cost.
    std::map<std::string, std::pair<std::string, std::vector<SenseId>>> pairs;
    for (const Instance& instance : instances) {
      std::vector<SenseId> candidates = instance.sorted_candidates();
      candidates.erase(std::unique(candidates.begin(), candidates.end()),
                       candidates.end());
      std::string key = instance.lemma;
      for (const SenseId& c : candidates) key += "\x1f" + c.str();
      pairs.emplace(std::move(key), std::make_pair(instance.lemma, std::move(candidates)));
    }
    std::int64_t calls = 0;
    std::int64_t prompt_tokens = 0;
    for (const auto& [key, pair] : pairs) {
      const bool covered =
          std::all_of(pair.second.begin(), pair.second.end(),
                      [&](const SenseId& c) { return existing.contains(c); });
      if (covered) continue;
      const PromptBundle bundle = build_definition_writing_prompt(
          pair.first, pair.second, graph, templates, args.max_neighbors);
      ++calls;
      prompt_tokens += estimate_tokens(bundle.system_text + bundle.user_text);
    }
    const std::int64_t completion_tokens = calls * 150;  // rough per-reply guess
    const std::optional<ModelPrice> price =
        setup->gateway.price_table().find(setup->model.model_name);
    const double dollars =
        price ? price->dollars(prompt_tokens, completion_tokens) : 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", dollars);
    std::cout << "dry run: " << calls << " definition calls, ~" << prompt_tokens
              << " prompt tokens, projected cost $" << buf << "\n";
    return 0;
  }

  const DefinitionWriteResult result =
      write_model_definitions(setup->gateway, setup->model, graph, templates, instances,
                              existing, args.max_neighbors);

  DefinitionMap merged = existing;
  for (const auto& [sense, def] : result.definitions) merged.emplace(sense, def);
  fs::create_directories(fs::path(args.out).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(args.out).parent_path());
  save_definitions_file(merged, args.out);

  const std::string errors_path =
      args.errors_out.empty() ? args.out + ".errors.jsonl" : args.errors_out;
  if (!result.errors.empty()) {
    std::string sidecar;
    for (const DefinitionWriteError& e : result.errors) {
      nlohmann::json j = {{"lemma", e.lemma},
                          {"message", e.message},
                          {"raw_reply", e.raw_reply}};
      nlohmann::json senses = nlohmann::json::array();
      for (const SenseId& s : e.senses) senses.push_back(s.str());
      j["senses"] = std::move(senses);
      sidecar += j.dump() + "\n";
    }
    detail::write_file_atomic(errors_path, sidecar);
  }

  std::cout << "defined " << result.definitions.size() << " senses in " << result.calls
            << " calls (" << result.skipped << " pairs already covered, "
            << result.errors.size() << " failed)\n";
  std::cout << "definitions: " << merged.size() << " total -> " << args.out << "\n";
  if (!result.errors.empty()) std::cout << "errors: " << errors_path << "\n";
  print_cost_summary(setup->gateway.ledger(), std::cout);
  return result.errors.empty() ? 0 : 3;
}

// ------------------------------------------------------------------- eval

struct EvalArgs {
  std::string lexicon;
  std::string test;
  std::string train;
  std::string dataset_name;
  std::string averaging = "macro";
  std::string system;
  std::string mode = "neighborhood";
  std::string model;
  std::string definitions;
  std::string templates_dir;
  std::string providers;
  std::string prices;
  std::string cache_dir;
  std::string out;
  std::uint64_t seed = 42;
  int workers = 0;  // 0 = pick per system
  int max_neighbors = 4;
  bool fallback_to_neighborhood = false;
  // PPR knobs
  double damping = 0.85;
  double ppr_tolerance = 1e-8;
  int ppr_max_iterations = 100;
  bool include_target_candidates = false;
  // word-expert knobs
  int epochs = 50;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  // gateway knobs
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::int64_t mock_prompt_tokens = 0;
  std::int64_t mock_completion_tokens = 0;
  bool dry_run = false;
  bool strict = false;
};

int cmd_eval(const EvalArgs& args) {
  const SenseGraph graph = load_lexicon_file(args.lexicon, args.strict);
  const std::vector<Instance> loaded = load_instances_file(args.test);
  const std::vector<Instance> instances = filter_for_evaluation(loaded);
  const std::string dataset_name =
      args.dataset_name.empty() ? fs::path(args.test).stem().string() : args.dataset_name;
  const Averaging averaging = averaging_from_string(args.averaging);

  SystemFn system;
  std::string system_name = args.system;
  int default_workers = 1;
  std::unique_ptr<GatewaySetup> setup;
  std::shared_ptr<PprEngine> ppr_engine;
  std::shared_ptr<std::map<std::string, WordExpertModel>> experts;

  if (args.system == "random") {
    const std::uint64_t seed = args.seed;
    system = [seed](const Instance& instance) {
      return SystemResult::from_prediction(
          random_choice(instance, instance_seed(seed, instance.id)));
    };
  } else if (args.system == "first-sense") {
    system = [](const Instance& instance) {
      return SystemResult::from_prediction(first_sense(instance));
    };
  } else if (args.system == "upper-bound") {
    system = [](const Instance& instance) {
      std::optional<Prediction> prediction = oracle_upper_bound(instance);
      if (!prediction) {
        return SystemResult::from_failure(FailureKind::not_present, "upper-bound");
      }
      return SystemResult::from_prediction(std::move(*prediction));
    };
  } else if (args.system == "ppr") {
    PprParams params;
    params.damping = args.damping;
    params.tolerance = args.ppr_tolerance;
    params.max_iterations = args.ppr_max_iterations;
    params.include_target_candidates = args.include_target_candidates;
    ppr_engine = std::make_shared<PprEngine>(graph);
    system = [ppr_engine, params](const Instance& instance) {
      return SystemResult::from_prediction(ppr_engine->disambiguate(instance, params));
    };
    default_workers = 4;
  } else if (args.system == "word-expert") {
    if (args.train.empty()) {
      throw ConfigError(
          "the word-expert system is supervised: pass --train with the "
          "dataset's training split (lexical-sample datasets ship one)");
    }
    WordExpertConfig config;
    config.epochs = args.epochs;
    config.learning_rate = args.learning_rate;
    config.l2 = args.l2;
    config.seed = args.seed;
    experts = std::make_shared<std::map<std::string, WordExpertModel>>(
        train_word_experts(load_instances_file(args.train), config));
    system = [experts](const Instance& instance) {
      const auto it = experts->find(instance.lemma);
      const WordExpertModel* model = it == experts->end() ? nullptr : &it->second;
      return SystemResult::from_prediction(predict_word_expert(model, instance));
    };
  } else if (args.system == "llm") {
    if (args.model.empty()) throw ConfigError("--system llm needs --model");
    const PromptMode mode = prompt_mode_from_string(args.mode);
    if (mode == PromptMode::write_definitions) {
      throw ConfigError("write_definitions is not a disambiguation mode; use define");
    }
    DefinitionMap definitions;
    if (!args.definitions.empty()) {
      definitions = load_definitions_file(args.definitions);
    } else if ((mode == PromptMode::definition || mode == PromptMode::auto_definition) &&
               !args.fallback_to_neighborhood) {
      throw ConfigError("mode '" + to_string(mode) + "' needs --definitions");
    }
    const PromptTemplates templates = PromptTemplates::load(args.templates_dir);
    LlmWsdOptions options;
    options.mode = mode;
    options.max_neighbors = args.max_neighbors;
    options.fallback_to_neighborhood = args.fallback_to_neighborhood;

    GatewayOptions gw_options;
    gw_options.model_arg = args.model;
    gw_options.providers_path = args.providers;
    gw_options.prices_path = args.prices;
    gw_options.cache_dir =
        args.cache_dir.empty() ? fs::path(args.out) / "cache" : fs::path(args.cache_dir);
    gw_options.ledger_path = fs::path(args.out) / "ledger.jsonl";
    gw_options.temperature = args.temperature;
    gw_options.max_output_tokens = args.max_output_tokens;
    gw_options.mock_prompt_tokens = args.mock_prompt_tokens;
    gw_options.mock_completion_tokens = args.mock_completion_tokens;
    if (args.dry_run) {
      gw_options.cache_dir.reset();
      gw_options.ledger_path.reset();
    } else {
      fs::create_directories(args.out);
    }
    setup = make_gateway(gw_options);
    if (setup->mock_spec.kind == MockSpec::Kind::oracle) {
      script_gold_answers(*setup->mock, instances, graph, definitions, templates,
                          options, args.mock_prompt_tokens, args.mock_completion_tokens);
    }
    if (args.dry_run) {
      std::int64_t prompt_tokens = 0;
      for (const Instance& instance : instances) {
        const PromptBundle bundle =
            build_wsd_prompt(instance, graph, definitions, templates, options);
        prompt_tokens += estimate_tokens(bundle.system_text + bundle.user_text);
      }
      const std::int64_t completion_tokens =
          static_cast<std::int64_t>(instances.size()) *
          (mode == PromptMode::chain_of_thought ? 200 : 5);
      const std::optional<ModelPrice> price =
          setup->gateway.price_table().find(setup->model.model_name);
      const double dollars =
          price ? price->dollars(prompt_tokens, completion_tokens) : 0.0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f", dollars);
      std::cout << "dry run: " << instances.size() << " prompts, ~" << prompt_tokens
                << " prompt tokens, projected cost $" << buf << "\n";
      return 0;
    }
    system_name = "llm/" + to_string(mode) + "/" + setup->model.str();
    auto disambiguator = std::make_shared<LlmDisambiguator>(
        setup->gateway, setup->model, graph, templates, std::move(definitions), options);
    system = [disambiguator](const Instance& instance) { return (*disambiguator)(instance); };
    default_workers = 4;
  } else {
    throw ConfigError("unknown system '" + args.system +
                      "' (random, first-sense, upper-bound, ppr, word-expert, llm)");
  }

  if (args.dry_run) {
    std::cout << "dry run: " << instances.size() << " instances, no API calls for system '"
              << args.system << "'\n";
    return 0;
  }

  fs::create_directories(args.out);
  EvalOptions eval_options;
  eval_options.workers = args.workers > 0 ? args.workers : default_workers;
  const EvalRun run =
      run_evaluation(system_name, dataset_name, averaging, instances, system, eval_options);

  const fs::path out_dir(args.out);
  detail::write_file_atomic(out_dir / "report.tsv",
                            emit_report(run.report, ReportFormat::tsv));
  detail::write_file_atomic(out_dir / "report.md",
                            emit_report(run.report, ReportFormat::markdown));
  write_outcomes(out_dir / "outcomes.jsonl", run.report);

  std::cout << "system: " << system_name << "\n";
  std::cout << "dataset: " << dataset_name << " (" << instances.size()
            << " instances evaluable of " << loaded.size() << " loaded)\n";
  std::cout << "macro: " << detail::fixed(run.report.macro_accuracy, 3) << "\n";
  std::cout << "micro: " << detail::fixed(run.report.micro_accuracy, 3) << "\n";
  std::cout << "failures: " << detail::failure_summary(run.report.failure_counts, " ")
            << "\n";
  if (setup) print_cost_summary(setup->gateway.ledger(), std::cout);
  std::cout << "report: " << (out_dir / "report.tsv").string() << ", "
            << (out_dir / "report.md").string() << "\n";
  std::cout << "outcomes: " << (out_dir / "outcomes.jsonl").string() << "\n";

  if (run.abort_error) {
    std::cerr << "error: run aborted after " << run.report.outcomes.size()
              << " outcomes: " << *run.abort_error << "\n";
    return 3;
  }
  return 0;
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::string outcomes;
  std::string format = "tsv";
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  const EvalReport report = read_outcomes(args.outcomes);
  const std::string text = emit_report(report, report_format_from_string(args.format));
  if (args.out.empty()) {
    std::cout << text;
  } else {
    detail::write_file_atomic(args.out, text);
    std::cout << "report: " << args.out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string outcomes_a;
  std::string outcomes_b;
  std::string format = "tsv";
  std::string out;
};

int cmd_compare(const CompareArgs& args) {
  const EvalReport a = read_outcomes(args.outcomes_a);
  const EvalReport b = read_outcomes(args.outcomes_b);
  const Comparison comparison = compare_reports(a, b);
  const std::string text =
      emit_comparison(comparison, report_format_from_string(args.format));
  if (args.out.empty()) {
    std::cout << text;
  } else {
    detail::write_file_atomic(args.out, text);
    std::cout << "comparison: " << args.out << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ costs

struct CostsArgs {
  std::string ledger;
};

int cmd_costs(const CostsArgs& args) {
  const std::vector<CostRecord> records = CostLedger::read_jsonl(args.ledger);
  std::map<std::string, CostTotals> by_model;
  CostTotals total;
  for (const CostRecord& r : records) {
    by_model[r.model].add(r);
    total.add(r);
  }
  const auto row = [](const std::string& model, const CostTotals& t) {
    char dollars[64];
    char per_call[64];
    std::snprintf(dollars, sizeof dollars, "%.4f", t.dollars);
    std::snprintf(per_call, sizeof per_call, "%.6f",
                  t.calls == 0 ? 0.0 : t.dollars / static_cast<double>(t.calls));
    std::cout << model << "\t" << t.calls << "\t" << t.prompt_tokens << "\t"
              << t.completion_tokens << "\t" << dollars << "\t" << per_call << "\n";
  };
  std::cout << "model\tcalls\tprompt_tokens\tcompletion_tokens\tdollars\tdollars_per_call\n";
  for (const auto& [model, totals] : by_model) row(model, totals);
  row("total", total);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmarking toolkit for word-sense disambiguation over "
               "sense-graph lexicons"};
  app.require_subcommand(1);

  const std::string default_templates = (resource_dir() / "templates").string();
  const std::string default_prices = (resource_dir() / "prices.json").string();
  const std::string default_providers = (resource_dir() / "providers.json").string();

  IngestArgs ingest_args;
  CLI::App* ingest = app.add_subcommand("ingest", "Validate and summarize input files");
  ingest->add_option("--lexicon", ingest_args.lexicon, "Lexicon TSV")->required();
  ingest->add_option("--instances", ingest_args.instance_files, "Instance JSONL file(s)");
  ingest->add_option("--definitions", ingest_args.definitions, "Definitions JSONL");
  ingest->add_flag("--strict", ingest_args.strict, "Reject dangling descriptor links");

  NeighborsArgs neighbors_args;
  CLI::App* neighbors =
      app.add_subcommand("neighbors", "Print a sense's neighbor lemmas, one per line");
  neighbors->add_option("--lexicon", neighbors_args.lexicon, "Lexicon TSV")->required();
  neighbors->add_option("sense", neighbors_args.sense, "Sense id, e.g. ämne..1")
      ->required();
  neighbors->add_option("--max", neighbors_args.max_neighbors, "Neighbor cap");
  neighbors->add_flag("--strict", neighbors_args.strict, "Reject dangling links");

  PromptArgs prompt_args;
  prompt_args.templates_dir = default_templates;
  CLI::App* prompt = app.add_subcommand("prompt", "Render the prompt for one instance");
  prompt->add_option("--lexicon", prompt_args.lexicon, "Lexicon TSV")->required();
  prompt->add_option("--instances", prompt_args.instances, "Instance JSONL")->required();
  prompt->add_option("--id", prompt_args.instance_id, "Instance id (default: first)");
  prompt->add_option("--mode", prompt_args.mode,
                     "neighborhood|definition|auto_definition|chain_of_thought|"
                     "write_definitions");
  prompt->add_option("--definitions", prompt_args.definitions,
                     "Definitions JSONL (definition modes)");
  prompt->add_option("--templates", prompt_args.templates_dir, "Template directory");
  prompt->add_option("--max-neighbors", prompt_args.max_neighbors, "Neighbor cap");
  prompt->add_flag("--strict", prompt_args.strict, "Reject dangling links");

  DefineArgs define_args;
  define_args.templates_dir = default_templates;
  define_args.providers = default_providers;
  define_args.prices = default_prices;
  CLI::App* define =
      app.add_subcommand("define", "Write model definitions for a dataset's senses");
  define->add_option("--lexicon", define_args.lexicon, "Lexicon TSV")->required();
  define->add_option("--instances", define_args.instances, "Instance JSONL")->required();
  define->add_option("--model", define_args.model,
                     "provider:model or mock:fixed:<reply> / mock:file:<path>")
      ->required();
  define->add_option("--out", define_args.out, "Definitions JSONL to write/extend")
      ->required();
  define->add_option("--errors", define_args.errors_out,
                     "Sidecar for failed pairs (default <out>.errors.jsonl)");
  define->add_option("--templates", define_args.templates_dir, "Template directory");
  define->add_option("--providers", define_args.providers, "Provider config JSON");
  define->add_option("--prices", define_args.prices, "Price table JSON");
  define->add_option("--cache-dir", define_args.cache_dir, "Completion cache directory");
  define->add_option("--max-neighbors", define_args.max_neighbors, "Neighbor cap");
  define->add_option("--temperature", define_args.temperature, "Sampling temperature");
  define->add_option("--max-output-tokens", define_args.max_output_tokens,
                     "Completion budget");
  define->add_option("--mock-prompt-tokens", define_args.mock_prompt_tokens,
                     "Token count the mock reports per prompt");
  define->add_option("--mock-completion-tokens", define_args.mock_completion_tokens,
                     "Token count the mock reports per completion");
  define->add_flag("--dry-run", define_args.dry_run,
                   "Print call count and projected cost, no API calls");
  define->add_flag("--strict", define_args.strict, "Reject dangling links");

  EvalArgs eval_args;
  eval_args.templates_dir = default_templates;
  eval_args.providers = default_providers;
  eval_args.prices = default_prices;
  CLI::App* eval = app.add_subcommand("eval", "Run a disambiguation system over a dataset");
  eval->add_option("--lexicon", eval_args.lexicon, "Lexicon TSV")->required();
  eval->add_option("--test", eval_args.test, "Test instances JSONL")->required();
  eval->add_option("--train", eval_args.train, "Training instances JSONL (word-expert)");
  eval->add_option("--dataset-name", eval_args.dataset_name,
                   "Dataset label (default: test file stem)");
  eval->add_option("--averaging", eval_args.averaging, "macro|micro");
  eval->add_option("--system", eval_args.system,
                   "random|first-sense|upper-bound|ppr|word-expert|llm")
      ->required();
  eval->add_option("--mode", eval_args.mode,
                   "LLM prompt mode: neighborhood|definition|auto_definition|"
                   "chain_of_thought");
  eval->add_option("--model", eval_args.model,
                   "provider:model, mock:oracle, mock:fixed:<reply>, mock:file:<path>");
  eval->add_option("--definitions", eval_args.definitions, "Definitions JSONL");
  eval->add_option("--templates", eval_args.templates_dir, "Template directory");
  eval->add_option("--providers", eval_args.providers, "Provider config JSON");
  eval->add_option("--prices", eval_args.prices, "Price table JSON");
  eval->add_option("--cache-dir", eval_args.cache_dir,
                   "Completion cache (default <out>/cache)");
  eval->add_option("--out", eval_args.out, "Output directory")->required();
  eval->add_option("--seed", eval_args.seed, "Seed for all randomness");
  eval->add_option("--workers", eval_args.workers, "Parallel instances (0 = auto)");
  eval->add_option("--max-neighbors", eval_args.max_neighbors, "Neighbor cap");
  eval->add_flag("--fallback-to-neighborhood", eval_args.fallback_to_neighborhood,
                 "Definition modes drop to neighborhood prompts when a "
                 "definition is missing");
  eval->add_option("--damping", eval_args.damping, "PPR damping factor");
  eval->add_option("--ppr-tolerance", eval_args.ppr_tolerance, "PPR L1 tolerance");
  eval->add_option("--ppr-max-iterations", eval_args.ppr_max_iterations,
                   "PPR iteration cap");
  eval->add_flag("--include-target-candidates", eval_args.include_target_candidates,
                 "Keep the target's own senses in the PPR teleport set");
  eval->add_option("--epochs", eval_args.epochs, "Word-expert training epochs");
  eval->add_option("--learning-rate", eval_args.learning_rate, "Word-expert SGD rate");
  eval->add_option("--l2", eval_args.l2, "Word-expert L2 regularization");
  eval->add_option("--temperature", eval_args.temperature, "Sampling temperature");
  eval->add_option("--max-output-tokens", eval_args.max_output_tokens,
                   "Completion budget");
  eval->add_option("--mock-prompt-tokens", eval_args.mock_prompt_tokens,
                   "Token count the mock reports per prompt");
  eval->add_option("--mock-completion-tokens", eval_args.mock_completion_tokens,
                   "Token count the mock reports per completion");
  eval->add_flag("--dry-run", eval_args.dry_run,
                 "Print instance count and projected cost, no API calls");
  eval->add_flag("--strict", eval_args.strict, "Reject dangling links");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Render a report from an outcomes file");
  report->add_option("--outcomes", report_args.outcomes, "Outcomes JSONL")->required();
  report->add_option("--format", report_args.format, "tsv|markdown");
  report->add_option("--out", report_args.out, "Write here instead of stdout");

  CompareArgs compare_args;
  CLI::App* compare =
      app.add_subcommand("compare", "Compare two runs on the same dataset");
  compare->add_option("--a", compare_args.outcomes_a, "Outcomes JSONL (system A)")
      ->required();
  compare->add_option("--b", compare_args.outcomes_b, "Outcomes JSONL (system B)")
      ->required();
  compare->add_option("--format", compare_args.format, "tsv|markdown");
  compare->add_option("--out", compare_args.out, "Write here instead of stdout");

  CostsArgs costs_args;
  CLI::App* costs = app.add_subcommand("costs", "Summarize a spend ledger");
  costs->add_option("--ledger", costs_args.ledger, "Ledger JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(ingest_args);
    if (neighbors->parsed()) return cmd_neighbors(neighbors_args);
    if (prompt->parsed()) return cmd_prompt(prompt_args);
    if (define->parsed()) return cmd_define(define_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (report->parsed()) return cmd_report(report_args);
    if (compare->parsed()) return cmd_compare(compare_args);
    if (costs->parsed()) return cmd_costs(costs_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
