#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;
    fs::path train, dev, test, gold;

    Workspace() {
        dir = fs::temp_directory_path() / "typology_cli";
        fs::remove_all(dir);
        fs::create_directories(dir);
        synthetic::Params p;
        p.seed = 99;
        p.features = 8;
        const auto s = synthetic::make_splits(p, 120, 30, 30);
        train = write("train.tsv", s.train);
        dev = write("dev.tsv", s.dev);
        test = write("test_blinded.tsv", s.test_blinded);
        gold = write("test_gold.tsv", s.test_gold);
    }
    ~Workspace() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name, std::ios::binary) << text;
        return dir / name;
    }

    std::string data_args() const {
        return " --train " + train.string() + " --dev " + dev.string() + " --test " + test.string();
    }

    int run(const std::string& args) const {
        const std::string cmd = std::string(TYPOLOGY_CLI) + " " + args + " >" + (dir / "stdout.txt").string() +
                                " 2>" + (dir / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string out() const { return slurp(dir / "stdout.txt"); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
};

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit with 2") {
        Workspace w;
        CHECK(w.run("") == 2);
        CHECK(w.run("--help") == 0);
        CHECK(w.out().find("--jobs") != std::string::npos);
        CHECK(w.run("stats --no-such-flag") == 2);
        CHECK(w.run("frobnicate") == 2);
        CHECK(w.run("baseline --system b9" + w.data_args()) == 2);
        CHECK(w.run("stats --train " + (w.dir / "missing.tsv").string()) == 2);
        CHECK(w.run("train --system system2 -o " + (w.dir / "m").string() + " --train " + w.train.string() +
                    " --dev " + w.dev.string()) == 2);
        CHECK(w.run("stats --train " + w.train.string() + " --radius -5") == 2);
    }

    TEST_CASE("malformed data exits with 3") {
        Workspace w;
        const fs::path bad = w.write("bad.tsv", synthetic::header() + "a\tA\tnot-a-number\t0\tG\tF\t\tX=1\n");
        CHECK(w.run("stats --train " + bad.string()) == 3);
    }

    TEST_CASE("train, predict, evaluate") {
        Workspace w;
        REQUIRE(w.run("stats" + w.data_args()) == 0);
        CHECK(w.out().find("train languages 120") != std::string::npos);
        REQUIRE(w.run("build-assoc --all-configs" + w.data_args()) == 0);
        CHECK(w.out().find("train+dev+test") != std::string::npos);
        REQUIRE(w.run("build-assoc -o " + (w.dir / "tables.tsv").string() + w.data_args()) == 0);
        CHECK(fs::file_size(w.dir / "tables.tsv") > 0);

        const std::string store = (w.dir / "models").string();
        REQUIRE(w.run("train --system system2 -o " + store + w.data_args() + " --jobs 3") == 0);
        REQUIRE(w.run("predict -m " + store + " -o " + (w.dir / "sub1.tsv").string() + w.data_args() + " --jobs 1") ==
                0);
        REQUIRE(w.run("predict -m " + store + " -o " + (w.dir / "sub4.tsv").string() + w.data_args() + " --jobs 4") ==
                0);
        const std::string sub1 = Workspace::slurp(w.dir / "sub1.tsv");
        CHECK(sub1 == Workspace::slurp(w.dir / "sub4.tsv"));
        CHECK(sub1.find("=?") == std::string::npos);

        REQUIRE(w.run("baseline --system b1 --split test --gold " + w.gold.string() + w.data_args()) == 0);
        REQUIRE(w.run("predict -m " + store + " -o " + (w.dir / "sub_again.tsv").string() + w.data_args()) == 0);
        REQUIRE(w.run("evaluate -p " + (w.dir / "sub1.tsv").string() + " --gold " + w.gold.string() + " -o " +
                      (w.dir / "report").string() + " --baseline-predictions " + (w.dir / "sub_again.tsv").string() +
                      w.data_args()) == 0);
        CHECK(w.out().find("micro accuracy") != std::string::npos);
        CHECK(w.out().find("correlation with instance count") != std::string::npos);
        CHECK(fs::exists(w.dir / "report" / "report.json"));
        CHECK(fs::exists(w.dir / "report" / "accuracy_vs_count.tsv"));

        // a submission with an unfilled slot is rejected
        CHECK(w.run("evaluate -p " + w.test.string() + " --gold " + w.gold.string() + w.data_args()) == 3);

        // the store refuses data it was not trained on
        synthetic::Params p;
        p.seed = 100;
        p.features = 8;
        const auto other = synthetic::make_splits(p, 120, 30, 30);
        const fs::path other_train = w.write("other_train.tsv", other.train);
        CHECK(w.run("predict -m " + store + " -o " + (w.dir / "x.tsv").string() + " --train " + other_train.string() +
                    " --dev " + w.dev.string() + " --test " + w.test.string()) == 3);
        CHECK_FALSE(fs::exists(w.dir / "x.tsv"));
    }

    TEST_CASE("baselines, ridge-eval, schema, map") {
        Workspace w;
        for (const char* b : {"b1", "b2", "b3", "b4", "b5"}) {
            CAPTURE(b);
            REQUIRE(w.run(std::string("baseline --split dev --system ") + b + w.data_args()) == 0);
            CHECK(w.out().find("micro accuracy") != std::string::npos);
        }
        REQUIRE(w.run("ridge-eval -o " + (w.dir / "dev").string() + w.data_args()) == 0);
        CHECK(fs::exists(w.dir / "dev" / "report.txt"));
        REQUIRE(w.run("schema --feature Feature_02" + w.data_args()) == 0);
        CHECK(w.out().find("dimension") != std::string::npos);
        CHECK(w.run("schema --feature Nope" + w.data_args()) == 3);
        REQUIRE(w.run("export-map -o " + (w.dir / "map.geojson").string() + w.data_args()) == 0);
        CHECK(Workspace::slurp(w.dir / "map.geojson").find("FeatureCollection") != std::string::npos);
    }

    TEST_CASE("config file supplies defaults and flags override it") {
        Workspace w;
        const fs::path cfg = w.write("run.toml", "train = \"" + w.train.string() + "\"\nalpha = 2.0\n");
        CHECK(w.run("--config " + cfg.string() + " stats") == 0);
        CHECK(w.out().find("train languages 120") != std::string::npos);
        const fs::path bad_cfg = w.write("bad.toml", "train = \"" + (w.dir / "nope.tsv").string() + "\"\n");
        CHECK(w.run("--config " + bad_cfg.string() + " stats") == 2);
        CHECK(w.run("--config " + bad_cfg.string() + " stats --train " + w.train.string()) == 0);
    }
}
