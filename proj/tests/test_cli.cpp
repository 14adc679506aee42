// End-to-end checks against the installed binary. The test runner passes its
// path in TYPEFORGE_BIN.
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "support/fixtures.hpp"
#include "typeforge/type_embedder.hpp"

using namespace typeforge;
using namespace testsupport;

namespace {

std::string binary_path() {
    const char* bin = std::getenv("TYPEFORGE_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "TYPEFORGE_BIN must point at the typeforge binary");
    return bin;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs through /bin/sh; `prefix` can set environment variables.
RunResult run(const TempDir& dir, const std::string& args, const std::string& prefix = "") {
    std::string out_path = dir.path() + "/cli-stdout.txt";
    std::string command =
        prefix + " \"" + binary_path() + "\" " + args + " > " + out_path + " 2> " +
        dir.path() + "/cli-stderr.txt";
    int status = std::system(command.c_str());
    RunResult result;
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_path);
    return result;
}

struct F1Files {
    std::string embeddings;
    std::string assertions;
};

F1Files write_f1(const TempDir& dir) {
    return {dir.write("f1.txt", f1_embeddings_text()), dir.write("f1.nt", f1_assertions_text())};
}

}  // namespace

TEST_CASE("no subcommand exits with usage failure") {
    TempDir dir;
    CHECK(run(dir, "").exit_code == 1);
    CHECK(run(dir, "no-such-command").exit_code == 1);
}

TEST_CASE("help exits cleanly") {
    TempDir dir;
    auto result = run(dir, "--help");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("build-types") != std::string::npos);
}

TEST_CASE("build-types writes a loadable model and a summary") {
    TempDir dir;
    auto f1 = write_f1(dir);
    std::string model_path = dir.path() + "/model.txt";
    auto result = run(dir, "build-types --embeddings " + f1.embeddings + " --assertions " +
                               f1.assertions + " --out " + model_path);
    REQUIRE(result.exit_code == 0);

    auto summary = nlohmann::json::parse(result.out);
    CHECK(summary.at("types") == 2);
    CHECK(summary.at("dim") == 2);
    CHECK(summary.at("entities_with_types") == 3);

    auto model = TypeEmbeddingModel::load(model_path);
    auto vec_a = *model.vector_of(kTypeA);
    CHECK(vec_a[0] == doctest::Approx(0.894427).epsilon(1e-5));
    CHECK(vec_a[1] == doctest::Approx(0.447214).epsilon(1e-5));
}

TEST_CASE("recommend emits one parseable line per id") {
    TempDir dir;
    auto f1 = write_f1(dir);
    std::string model_path = dir.path() + "/model.txt";
    REQUIRE(run(dir, "build-types --embeddings " + f1.embeddings + " --assertions " +
                         f1.assertions + " --out " + model_path)
                .exit_code == 0);
    std::string ids = dir.write("ids.txt", kE1 + "\n" + kE3 + "\n");

    auto result = run(dir, "recommend --model " + model_path + " --embeddings " + f1.embeddings +
                               " --ids " + ids + " --k 2");
    REQUIRE(result.exit_code == 0);

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < result.out.size()) {
        auto end = result.out.find('\n', start);
        if (end == std::string::npos) break;
        lines.push_back(result.out.substr(start, end - start));
        start = end + 1;
    }
    REQUIRE(lines.size() == 2);
    auto first = nlohmann::json::parse(lines[0]);
    CHECK(first.at("id") == kE1);
    CHECK(first.at("types").size() == 2);
    CHECK(first.at("types").at(0).at(0) == kTypeA);
}

TEST_CASE("eval rejects an out-of-range fold and missing files") {
    TempDir dir;
    auto f1 = write_f1(dir);
    // Usage problem: fold index beyond the fold list.
    auto usage = run(dir, "eval --folds " + f1.assertions + " " + f1.assertions +
                              " --embeddings " + f1.embeddings + " --test-fold 9");
    CHECK(usage.exit_code == 1);
    // Data problem: fold file that does not exist.
    auto data = run(dir, "eval --folds " + dir.path() + "/none-0.nt " + dir.path() +
                             "/none-1.nt --embeddings " + f1.embeddings + " --test-fold 0");
    CHECK(data.exit_code == 2);
}

TEST_CASE("flags beat environment, environment beats defaults") {
    TempDir dir;
    auto kb = make_random_kb(60, 4, 4, 2, 5);
    std::string assertions = dir.write("kb.nt", kb.assertions_text);

    // Fingerprint a run by its fold file contents; partition.json embeds
    // output paths, which differ per run directory.
    auto fingerprint = [&](const std::string& name, const std::string& args,
                           const std::string& prefix) {
        auto result = run(dir, "partition --assertions " + assertions + " --folds 3 --out " +
                                   dir.path() + "/" + name + " " + args, prefix);
        REQUIRE(result.exit_code == 0);
        std::string all;
        for (int f = 0; f < 3; ++f)
            all += slurp(dir.path() + "/" + name + "/fold-" + std::to_string(f) + ".nt") + "\x1f";
        return all;
    };

    std::string flag_seed_1 = fingerprint("a", "--seed 1", "");
    std::string env_seed_1 = fingerprint("b", "", "TYPEFORGE_SEED=1");
    std::string flag_wins = fingerprint("c", "--seed 1", "TYPEFORGE_SEED=2");
    std::string seed_2 = fingerprint("d", "--seed 2", "");

    CHECK(env_seed_1 == flag_seed_1);
    CHECK(flag_wins == flag_seed_1);
    CHECK(seed_2 != flag_seed_1);
}

TEST_CASE("reruns are byte-identical") {
    TempDir dir;
    auto f1 = write_f1(dir);
    std::string first_path = dir.path() + "/m1.txt";
    std::string second_path = dir.path() + "/m2.txt";
    std::string base = "build-types --embeddings " + f1.embeddings + " --assertions " +
                       f1.assertions + " --seed 7 --out ";
    REQUIRE(run(dir, base + first_path).exit_code == 0);
    REQUIRE(run(dir, base + second_path).exit_code == 0);
    CHECK(slurp(first_path) == slurp(second_path));
}

TEST_CASE("ontology-subtypes lists each root's children") {
    TempDir dir;
    std::string ontology = dir.write(
        "onto.nt",
        "<http://x/a> <" + std::string(kRdfsSubClassOf) + "> <http://x/root> .\n" +
            "<http://x/b> <" + std::string(kRdfsSubClassOf) + "> <http://x/root> .\n");
    auto result = run(dir, "ontology-subtypes --ontology " + ontology + " --roots http://x/root");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out == "http://x/root\thttp://x/a\nhttp://x/root\thttp://x/b\n");
}

TEST_CASE("bad log level is a usage error") {
    TempDir dir;
    auto f1 = write_f1(dir);
    auto result = run(dir, "partition --assertions " + f1.assertions + " --folds 2 --out " +
                               dir.path() + "/p --log-level shouty");
    CHECK(result.exit_code == 1);
}
