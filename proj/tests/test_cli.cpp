#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#ifndef ALCORE_CLI_PATH
#error "ALCORE_CLI_PATH must point at the built command-line binary"
#endif

namespace {

const std::filesystem::path kDir = std::filesystem::temp_directory_path() / "alcore_test_cli";

std::string path_of(const std::string& name) { return (kDir / name).string(); }

void write_file(const std::string& name, const std::string& contents) {
    std::filesystem::create_directories(kDir);
    std::ofstream out(kDir / name, std::ios::binary);
    out << contents;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int run(const std::string& args) {
    std::filesystem::create_directories(kDir);
    const std::string cmd =
        std::string(ALCORE_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("help and argument parsing exit codes") {
    CHECK(run("--help") == 0);
    CHECK(run("select --help") == 0);
    CHECK(run("") == 2);                      // missing subcommand
    CHECK(run("teleport") == 2);              // unknown subcommand
    CHECK(run("select --strategy coreset") == 2);  // missing required options
    CHECK(run("generate --n 10 --out-features x --out-labels y --verbose") == 2);
}

TEST_CASE("coreset selection writes the expected index file") {
    write_file("line.csv", "0\n4\n10\n");
    write_file("labeled.txt", "0\n");
    const int code = run("select --features " + path_of("line.csv") + " --labeled " +
                         path_of("labeled.txt") + " --strategy coreset --budget 2 --out " +
                         path_of("picks.txt"));
    CHECK(code == 0);
    CHECK(read_file(path_of("picks.txt")) == "2\n1\n");
}

TEST_CASE("score-based selection consumes a full-length score file") {
    write_file("feat4.csv", "0\n1\n6\n10\n");
    write_file("lab0.txt", "0\n");
    write_file("scores4.txt", "0.9\n0.1\n0.5\n0.8\n");

    const std::string base = "select --features " + path_of("feat4.csv") + " --labeled " +
                             path_of("lab0.txt") + " --uncertainty " + path_of("scores4.txt");
    CHECK(run(base + " --strategy learning-loss --budget 2 --out " + path_of("ll.txt")) == 0);
    CHECK(read_file(path_of("ll.txt")) == "3\n2\n");

    // One-shot entropy runs on the same supplied scores.
    CHECK(run(base + " --strategy entropy --budget 2 --out " + path_of("ent.txt")) == 0);
    CHECK(read_file(path_of("ent.txt")) == "3\n2\n");

    CHECK(run(base + " --strategy confident-coreset --alpha 0.5 --budget 1 --out " +
              path_of("cc.txt")) == 0);
    // The hand-traced product example: scores 0.9/0.5/0.1 on candidates 1,2,3.
    write_file("scores-trace.txt", "0\n0.9\n0.5\n0.1\n");
    CHECK(run("select --features " + path_of("feat4.csv") + " --labeled " + path_of("lab0.txt") +
              " --uncertainty " + path_of("scores-trace.txt") +
              " --strategy confident-coreset --alpha 0.5 --budget 1 --out " +
              path_of("cc2.txt")) == 0);
    CHECK(read_file(path_of("cc2.txt")) == "2\n");

    CHECK(run(base + " --strategy rank-fusion --budget 1 --out " + path_of("rf.txt")) == 0);
    CHECK(run(base + " --strategy sequential --budget 2 --out " + path_of("seq.txt")) == 0);
}

TEST_CASE("argument errors exit with code 2") {
    write_file("feat4b.csv", "0\n1\n6\n10\n");
    write_file("lab0b.txt", "0\n");
    write_file("short.txt", "0.9\n0.1\n");
    const std::string base = "select --features " + path_of("feat4b.csv") + " --labeled " +
                             path_of("lab0b.txt");

    // Uncertainty strategies demand a score file.
    CHECK(run(base + " --strategy confident-coreset --budget 1 --out " + path_of("o.txt")) == 2);
    CHECK(run(base + " --strategy learning-loss --budget 1 --out " + path_of("o.txt")) == 2);
    // Score file length must match the pool.
    CHECK(run(base + " --strategy learning-loss --uncertainty " + path_of("short.txt") +
              " --budget 1 --out " + path_of("o.txt")) == 2);
    // Alpha range, budget feasibility, unknown strategy, tiny sequential budget.
    CHECK(run(base + " --strategy coreset --budget 2 --alpha 1.5 --out " + path_of("o.txt")) ==
          2);
    CHECK(run(base + " --strategy coreset --budget 9 --out " + path_of("o.txt")) == 2);
    CHECK(run(base + " --strategy magic --budget 1 --out " + path_of("o.txt")) == 2);
    write_file("full4.txt", "0.1\n0.2\n0.3\n0.4\n");
    CHECK(run(base + " --strategy sequential --uncertainty " + path_of("full4.txt") +
              " --budget 1 --out " + path_of("o.txt")) == 2);
}

TEST_CASE("I/O errors exit with code 3") {
    write_file("lab0c.txt", "0\n");
    CHECK(run("select --features /nonexistent/f.csv --labeled " + path_of("lab0c.txt") +
              " --strategy coreset --budget 1 --out " + path_of("o.txt")) == 3);

    write_file("ragged.csv", "1,2\n3\n");
    CHECK(run("select --features " + path_of("ragged.csv") + " --labeled " +
              path_of("lab0c.txt") + " --strategy coreset --budget 1 --out " + path_of("o.txt")) ==
          3);

    write_file("ok.csv", "0\n1\n2\n");
    CHECK(run("select --features " + path_of("ok.csv") + " --labeled " + path_of("lab0c.txt") +
              " --strategy coreset --budget 1 --out /nonexistent/dir/o.txt") == 3);

    CHECK(run("simulate --config /nonexistent/run.cfg --out " + path_of("c.csv")) == 3);
}

TEST_CASE("random selection is reproducible per seed") {
    write_file("feat6.csv", "0\n1\n2\n3\n4\n5\n");
    write_file("lab06.txt", "0\n");
    const std::string base = "select --features " + path_of("feat6.csv") + " --labeled " +
                             path_of("lab06.txt") + " --strategy random --budget 3 --seed 11 ";
    CHECK(run(base + "--out " + path_of("r1.txt")) == 0);
    CHECK(run(base + "--out " + path_of("r2.txt")) == 0);
    CHECK(read_file(path_of("r1.txt")) == read_file(path_of("r2.txt")));

    CHECK(run("select --features " + path_of("feat6.csv") + " --labeled " + path_of("lab06.txt") +
              " --strategy random --budget 3 --seed 12 --out " + path_of("r3.txt")) == 0);
    CHECK(read_file(path_of("r1.txt")) != read_file(path_of("r3.txt")));
}

TEST_CASE("generated datasets round-trip and are deterministic") {
    const std::string gen = "generate --kind gaussian-mixture --n 30 --d 3 --priors 0.5,0.3,0.2 "
                            "--spread 0.2 --seed 4 ";
    CHECK(run(gen + "--out-features " + path_of("gx.csv") + " --out-labels " +
              path_of("gy.txt")) == 0);
    CHECK(run(gen + "--out-features " + path_of("gx2.csv") + " --out-labels " +
              path_of("gy2.txt")) == 0);
    CHECK(read_file(path_of("gx.csv")) == read_file(path_of("gx2.csv")));
    CHECK(read_file(path_of("gy.txt")) == read_file(path_of("gy2.txt")));

    // 30 feature rows, 30 labels, classes 0..2 present.
    const std::string labels = read_file(path_of("gy.txt"));
    CHECK(std::count(labels.begin(), labels.end(), '\n') == 30);

    CHECK(run("generate --kind two-moons --n 20 --out-features " + path_of("mx.csv") +
              " --out-labels " + path_of("my.txt")) == 0);
    CHECK(run("generate --kind klein-bottle --n 20 --out-features " + path_of("kx.csv") +
              " --out-labels " + path_of("ky.txt")) == 2);
    CHECK(run("generate --kind two-moons --n 20 --classes 3 --out-features " + path_of("bx.csv") +
              " --out-labels " + path_of("by.txt")) == 2);
}

TEST_CASE("simulate runs a config end to end, byte-identically") {
    write_file("sim.cfg",
               "n = 150\n"
               "d = 2\n"
               "spread = 0.4\n"
               "rounds = 2\n"
               "seeds = 1, 2\n"
               "epochs = 4\n"
               "batch_size = 8\n"
               "hidden = 6\n"
               "strategies = random, coreset\n");
    CHECK(run("simulate --config " + path_of("sim.cfg") + " --out " + path_of("c1.csv")) == 0);
    CHECK(run("simulate --config " + path_of("sim.cfg") + " --out " + path_of("c2.csv")) == 0);
    const std::string csv = read_file(path_of("c1.csv"));
    CHECK(csv == read_file(path_of("c2.csv")));
    CHECK(csv.rfind("strategy,seed,round,num_labeled,fraction_labeled,test_accuracy,"
                    "macro_recall\n",
                    0) == 0);
    CHECK(csv.find(",mean,") != std::string::npos);
    CHECK(csv.find(",stderr,") != std::string::npos);

    write_file("bad.cfg", "n = 100\nstrategies = random\nwat = 9\n");
    CHECK(run("simulate --config " + path_of("bad.cfg") + " --out " + path_of("c3.csv")) == 2);
}

TEST_CASE("generated data feeds simulate through the files dataset") {
    CHECK(run("generate --kind gaussian-mixture --n 120 --d 2 --classes 2 --spread 0.5 --seed 2 "
              "--out-features " +
              path_of("fx.csv") + " --out-labels " + path_of("fy.txt")) == 0);
    write_file("files.cfg",
               "dataset = files\n"
               "features = " + path_of("fx.csv") + "\n"
               "labels = " + path_of("fy.txt") + "\n"
               "rounds = 2\n"
               "seeds = 1\n"
               "epochs = 3\n"
               "batch_size = 8\n"
               "hidden = 5\n"
               "strategies = confident-coreset@0.25\n");
    CHECK(run("simulate --config " + path_of("files.cfg") + " --out " + path_of("fc.csv")) == 0);
    const std::string csv = read_file(path_of("fc.csv"));
    CHECK(csv.find("confident-coreset-a0.25,1,0,") != std::string::npos);
}
