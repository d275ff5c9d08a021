#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "sensebench/detail/io.hpp"
#include "support.hpp"

using testsupport::run_command;
using testsupport::shell_quote;

namespace {

std::string cli() { return shell_quote(SENSEBENCH_CLI_PATH); }

std::string lexicon_arg() {
  return "--lexicon " + shell_quote((testsupport::data_dir() / "lexicon_mini.tsv").string());
}

std::string oppna_instances() {
  return shell_quote((testsupport::testdata_dir() / "instance_oppna.jsonl").string());
}

std::string toy_instances() {
  return shell_quote((testsupport::testdata_dir() / "toy_test.jsonl").string());
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("neighbors prints neighbor lemmas in graph order", "[cli]") {
  const auto result = run_command(cli() + " neighbors " + lexicon_arg() + " ämne..1");
  CHECK(result.exit_code == 0);
  CHECK(result.output == "vad\nmetall\ngift\nämnesnamn\n");

  SECTION("the cap truncates from the back") {
    const auto capped =
        run_command(cli() + " neighbors --max 2 " + lexicon_arg() + " ämne..1");
    CHECK(capped.exit_code == 0);
    CHECK(capped.output == "vad\nmetall\n");
  }

  SECTION("an isolated sense prints nothing") {
    const auto empty = run_command(cli() + " neighbors " + lexicon_arg() + " isolat..1");
    CHECK(empty.exit_code == 0);
    CHECK(empty.output.empty());
  }

  SECTION("an unknown sense exits 2") {
    const auto missing = run_command(cli() + " neighbors " + lexicon_arg() + " finnsej..1");
    CHECK(missing.exit_code == 2);
    CHECK(contains(missing.output, "not in the lexicon"));
  }
}

TEST_CASE("ingest summarizes the inputs", "[cli]") {
  const auto result = run_command(cli() + " ingest " + lexicon_arg() + " --instances " +
                                  toy_instances());
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, "lexicon: 19 senses, 17 lemmas, 17 with primary descriptor"));
  CHECK(contains(result.output, "instances: 5 loaded, 5 evaluable, 5 with gold among candidates"));
}

TEST_CASE("prompt renders the neighborhood prompt for an instance", "[cli]") {
  const auto result = run_command(cli() + " prompt " + lexicon_arg() + " --instances " +
                                  oppna_instances() + " --id oppna-b1");
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, testsupport::read_golden("neighborhood_user_oppna.txt")));
  CHECK(contains(result.output, "=== system ==="));
  CHECK(contains(result.output, "1 -> öppna..1"));
  CHECK(contains(result.output, "2 -> öppna..2"));

  SECTION("write_definitions mode renders the lexicographer prompt") {
    const auto wd = run_command(cli() + " prompt --mode write_definitions " +
                                lexicon_arg() + " --instances " + oppna_instances());
    CHECK(wd.exit_code == 0);
    CHECK(contains(wd.output, testsupport::read_golden("write_definitions_user_oppna.txt")));
  }

  SECTION("an unknown instance id is an error") {
    const auto missing = run_command(cli() + " prompt " + lexicon_arg() + " --instances " +
                                     oppna_instances() + " --id nope");
    CHECK(missing.exit_code == 1);
    CHECK(contains(missing.output, "error:"));
  }
}

TEST_CASE("eval runs the unsupervised baselines end to end", "[cli]") {
  testsupport::TempDir dir;
  const std::string out = shell_quote((dir / "first-sense").string());
  const auto result =
      run_command(cli() + " eval " + lexicon_arg() + " --test " + toy_instances() +
                  " --system first-sense --out " + out);
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, "system: first-sense"));
  CHECK(contains(result.output, "dataset: toy_test (5 instances evaluable of 5 loaded)"));
  CHECK(contains(result.output, "macro: 0.750"));
  CHECK(contains(result.output, "micro: 0.800"));

  const std::string report =
      sensebench::detail::read_file(dir / "first-sense" / "report.tsv");
  CHECK(contains(report, "hund\t2\t0.5000"));
  CHECK(contains(report, "katt\t3\t1.0000"));

  SECTION("report re-renders from the outcomes file") {
    const std::string outcomes = shell_quote((dir / "first-sense" / "outcomes.jsonl").string());
    const auto rendered = run_command(cli() + " report --outcomes " + outcomes);
    CHECK(rendered.exit_code == 0);
    CHECK(contains(rendered.output, "# system: first-sense"));
    CHECK(contains(rendered.output, "katt\t3\t1.0000"));

    const auto markdown =
        run_command(cli() + " report --format md --outcomes " + outcomes);
    CHECK(markdown.exit_code == 0);
    CHECK(contains(markdown.output, "| katt | 3 | 1.0000 |"));
  }

  SECTION("compare joins two runs on the same dataset") {
    const std::string upper_out = shell_quote((dir / "upper").string());
    REQUIRE(run_command(cli() + " eval " + lexicon_arg() + " --test " + toy_instances() +
                        " --system upper-bound --out " + upper_out)
                .exit_code == 0);
    const auto compared = run_command(
        cli() + " compare --a " + shell_quote((dir / "first-sense" / "outcomes.jsonl").string()) +
        " --b " + shell_quote((dir / "upper" / "outcomes.jsonl").string()));
    CHECK(compared.exit_code == 0);
    CHECK(contains(compared.output, "# systems: first-sense vs upper-bound"));
    CHECK(contains(compared.output, "hund\t2\t0.5000\t1.0000\t-0.5000"));
    CHECK(contains(compared.output, "# micro: 0.800 vs 1.000"));
  }
}

TEST_CASE("eval with the random baseline is seed-stable", "[cli]") {
  testsupport::TempDir dir;
  const auto run_once = [&](const std::string& name, std::uint64_t seed) {
    const std::string out = shell_quote((dir / name).string());
    const auto result = run_command(
        cli() + " eval " + lexicon_arg() + " --test " + toy_instances() +
        " --system random --seed " + std::to_string(seed) + " --out " + out);
    REQUIRE(result.exit_code == 0);
    return sensebench::detail::read_file(dir / name / "outcomes.jsonl");
  };
  CHECK(run_once("a", 7) == run_once("b", 7));
}

TEST_CASE("word-expert evaluation requires a training split", "[cli]") {
  testsupport::TempDir dir;
  const auto result =
      run_command(cli() + " eval " + lexicon_arg() + " --test " + toy_instances() +
                  " --system word-expert --out " + shell_quote((dir / "we").string()));
  CHECK(result.exit_code == 1);
  CHECK(contains(result.output, "error:"));
  CHECK(contains(result.output, "--train"));
}

TEST_CASE("eval with a scripted oracle matches the upper bound", "[cli]") {
  testsupport::TempDir dir;
  const std::string out = shell_quote((dir / "llm").string());
  const auto result = run_command(
      cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
      " --system llm --model mock:oracle --mode neighborhood --out " + out);
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, "system: llm/neighborhood/mock:mock-model"));
  CHECK(contains(result.output, "macro: 1.000"));
  CHECK(contains(result.output, "micro: 1.000"));
  CHECK(contains(result.output,
                 "failures: parse_failure=0 zero_answer=0 not_present=0 provider_error=0"));
  CHECK(contains(result.output, "cost: $0.0000 over 1 calls"));

  SECTION("a second run over the same output directory hits the cache") {
    const auto again = run_command(
        cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
        " --system llm --model mock:oracle --mode neighborhood --out " + out);
    CHECK(again.exit_code == 0);
    CHECK(contains(again.output, "micro: 1.000"));
    CHECK(contains(again.output, "cost: $0.0000 over 0 calls"));
  }
}

TEST_CASE("dry runs make no API calls and write nothing", "[cli]") {
  testsupport::TempDir dir;
  const std::string out = shell_quote((dir / "dry").string());

  const auto baseline =
      run_command(cli() + " eval " + lexicon_arg() + " --test " + toy_instances() +
                  " --system first-sense --dry-run --out " + out);
  CHECK(baseline.exit_code == 0);
  CHECK(contains(baseline.output, "dry run: 5 instances, no API calls for system 'first-sense'"));

  const auto llm = run_command(
      cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
      " --system llm --model mock:oracle --mode neighborhood --dry-run --out " + out);
  CHECK(llm.exit_code == 0);
  CHECK(contains(llm.output, "dry run: 1 prompts, ~"));
  CHECK_FALSE(std::filesystem::exists(dir / "dry"));
}

TEST_CASE("define writes model definitions through the mock", "[cli]") {
  testsupport::TempDir dir;
  const std::string out = shell_quote((dir / "defs.jsonl").string());
  const std::string reply_file =
      shell_quote((testsupport::testdata_dir() / "define_reply_oppna.txt").string());

  const auto result = run_command(
      cli() + " define " + lexicon_arg() + " --instances " + oppna_instances() +
      " --model mock:file:" + reply_file + " --out " + out);
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, "defined 2 senses in 1 calls (0 pairs already covered, 0 failed)"));
  CHECK(contains(result.output, "definitions: 2 total -> "));

  const std::string written = sensebench::detail::read_file(dir / "defs.jsonl");
  CHECK(contains(written, "öppna..1"));
  CHECK(contains(written, "Göra så att något inte längre är stängt."));
  // The heal pass joined the reply's wrapped example sentence.
  CHECK(contains(written, "Hon gick fram för att öppna dörren."));

  SECTION("a rerun skips covered pairs entirely") {
    const auto again = run_command(
        cli() + " define " + lexicon_arg() + " --instances " + oppna_instances() +
        " --model mock:file:" + reply_file + " --out " + out);
    CHECK(again.exit_code == 0);
    CHECK(contains(again.output, "defined 0 senses in 0 calls (1 pairs already covered, 0 failed)"));
  }

  SECTION("the written definitions drive an auto_definition evaluation") {
    const auto ingest = run_command(cli() + " ingest " + lexicon_arg() +
                                    " --definitions " + out);
    CHECK(ingest.exit_code == 0);
    CHECK(contains(ingest.output, "definitions: 2 (2 model-written) from "));

    const auto eval = run_command(
        cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
        " --system llm --model mock:oracle --mode auto_definition --definitions " + out +
        " --out " + shell_quote((dir / "ad").string()));
    CHECK(eval.exit_code == 0);
    CHECK(contains(eval.output, "system: llm/auto_definition/mock:mock-model"));
    CHECK(contains(eval.output, "micro: 1.000"));
  }

  SECTION("define dry-run projects the call count") {
    const std::string fresh = shell_quote((dir / "defs2.jsonl").string());
    const auto dry = run_command(
        cli() + " define --dry-run " + lexicon_arg() + " --instances " + oppna_instances() +
        " --model mock:file:" + reply_file + " --out " + fresh);
    CHECK(dry.exit_code == 0);
    CHECK(contains(dry.output, "dry run: 1 definition calls, ~"));
    CHECK_FALSE(std::filesystem::exists(dir / "defs2.jsonl"));
  }
}

TEST_CASE("define refuses the oracle mock", "[cli]") {
  testsupport::TempDir dir;
  const auto result = run_command(
      cli() + " define " + lexicon_arg() + " --instances " + oppna_instances() +
      " --model mock:oracle --out " + shell_quote((dir / "defs.jsonl").string()));
  CHECK(result.exit_code == 1);
  CHECK(contains(result.output, "error:"));
  CHECK(contains(result.output, "mock:oracle"));
}

TEST_CASE("definition modes without definitions are an error", "[cli]") {
  testsupport::TempDir dir;
  const auto result = run_command(
      cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
      " --system llm --model mock:oracle --mode definition --out " +
      shell_quote((dir / "x").string()));
  CHECK(result.exit_code == 1);
  CHECK(contains(result.output, "needs --definitions"));
}

TEST_CASE("costs summarizes a ledger per model", "[cli]") {
  testsupport::TempDir dir;
  const std::string out = shell_quote((dir / "llm").string());
  REQUIRE(run_command(cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
                      " --system llm --model mock:oracle --mode neighborhood" +
                      " --mock-prompt-tokens 680 --mock-completion-tokens 100 --out " + out)
              .exit_code == 0);
  const auto result = run_command(
      cli() + " costs --ledger " + shell_quote((dir / "llm" / "ledger.jsonl").string()));
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output,
                 "model\tcalls\tprompt_tokens\tcompletion_tokens\tdollars\tdollars_per_call"));
  CHECK(contains(result.output, "mock-model\t1\t680\t100\t0.0000\t0.000000"));
  CHECK(contains(result.output, "total\t1\t680\t100\t0.0000\t0.000000"));
}

TEST_CASE("an unknown model provider is a configuration error", "[cli]") {
  testsupport::TempDir dir;
  const auto result = run_command(
      cli() + " eval " + lexicon_arg() + " --test " + oppna_instances() +
      " --system llm --model nowhere:gpt-x --out " + shell_quote((dir / "x").string()));
  CHECK(result.exit_code == 1);
  CHECK(contains(result.output, "provider 'nowhere' not declared"));
}
