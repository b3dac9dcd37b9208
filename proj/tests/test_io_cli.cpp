#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "sfflab/cli.hpp"
#include "sfflab/io.hpp"

using namespace sfflab;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sfflab_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& out, const std::string& env = {}) {
    const std::string cmd = env + " " + SFFLAB_CLI_PATH + " " + args + " --out " + out.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, M_PI}) CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("sha256") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("csv layouts") {
    const auto g = TimeGrid::linear(0.0, 1.0, 2);
    const Curve c(g, {1.0, 0.5}, "x");
    CHECK(io::curve_csv(c) == "t,value\n0,1\n1,0.5\n");
    const std::vector<Curve> cs{c, c};
    const std::vector<std::string> names{"S_1", "S_5"};
    CHECK(io::curves_csv(cs, names).rfind("t,S_1,S_5\n", 0) == 0);
    const std::vector<double> lv{2.0, 3.0};
    CHECK(io::levels_csv(lv) == "index,energy\n0,2\n1,3\n");
    const Histogram h{{0.0, 1.0}, {1.0}};
    CHECK(io::histogram_csv(h) == "bin_left,bin_right,density\n0,1,1\n");
}

TEST_CASE("output set writes the manifest last with checksums") {
    const auto dir = scratch("outset");
    io::OutputSet out(dir);
    out.write("a.csv", "t,value\n");
    out.write_manifest({{"tool", "x"}});
    const auto m = manifest(dir);
    REQUIRE(m["files"].size() == 1);
    CHECK(m["files"][0]["name"] == "a.csv");
    CHECK(m["files"][0]["sha256"] == io::sha256_hex("t,value\n"));
    CHECK_FALSE(fs::exists(dir / "a.csv.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("argument parsing") {
    auto ok = cli::parse_args(split("knsff --ensemble gue --dim 100 --realizations 1000 --k 1,5,20,40 --seed 7"));
    REQUIRE(ok.config.has_value());
    CHECK(ok.config->command == "knsff");
    CHECK(ok.config->ensemble == EnsembleKind::GUE);
    CHECK(ok.config->dim == 100);
    CHECK(ok.config->realizations == 1000);
    CHECK(ok.config->k_list == std::vector<int>{1, 5, 20, 40});
    CHECK(ok.config->seed == 7);
    CHECK(ok.config->grid.kind == TimeGrid::Kind::Linear);
    CHECK(ok.config->grid.n_points == 2000);
    CHECK(ok.config->grid.t_max == doctest::Approx(4.0 * M_PI));

    const auto sff = cli::parse_args(split("sff --ensemble goe --dim 50"));
    REQUIRE(sff.config.has_value());
    CHECK(sff.config->grid.kind == TimeGrid::Kind::Logarithmic);
    CHECK(sff.config->grid.n_points == 600);
    CHECK(sff.config->effective_epsilon() == 0.1);
    CHECK(cli::parse_args(split("sff --ensemble gse --dim 50")).config->effective_epsilon() == 0.25);
    CHECK(cli::parse_args(split("xxz --length 8")).config->effective_epsilon() == 0.2);

    CHECK(cli::parse_args(split("sff --ensemble gse")).exit_code == cli::kExitUsage);
    CHECK_FALSE(cli::parse_args(split("sff --ensemble gse")).config.has_value());
    CHECK(cli::parse_args(split("xxz --length 13")).exit_code == cli::kExitUsage);
    CHECK(cli::parse_args(split("sff --ensemble gue --dim 10 --bogus")).exit_code == cli::kExitUsage);
    CHECK(cli::parse_args(split("knsff --ensemble gue --dim 10 --unfold identity --eta 3")).exit_code == cli::kExitUsage);
    CHECK(cli::parse_args(split("knsff --ensemble gue --dim 10 --k 10")).exit_code == cli::kExitUsage);
    CHECK(cli::parse_args(split("timescales --ensemble poisson --dim 10")).exit_code == cli::kExitUsage);
    CHECK(cli::parse_args(split("unknown")).exit_code == cli::kExitUsage);
}

TEST_CASE("cli runs") {
    const auto a = scratch("kstar");
    REQUIRE(run_cli("kstar --ensemble poisson --dim 200", a) == 0);
    CHECK(manifest(a)["derived"]["k_star"] == 28);

    const auto b = scratch("timescales");
    REQUIRE(run_cli("timescales --ensemble goe --dim 200 --kmax 150 --epsilon 0.1", b) == 0);
    const auto ts = nlohmann::json::parse(slurp(b / "timescales.json"));
    REQUIRE(ts["t_dip"].is_number());
    REQUIRE(ts["t_thouless"].is_number());
    CHECK(ts["t_dip"].get<double>() < ts["t_thouless"].get<double>());
    CHECK(ts["plateau_time"].get<double>() == doctest::Approx(2.0 * M_PI));

    // Every file is listed with a checksum that matches its bytes.
    for (const auto& f : manifest(b)["files"]) CHECK(io::sha256_hex(slurp(b / f["name"].get<std::string>())) == f["sha256"]);

    const auto c = scratch("det1"), d = scratch("det2");
    const std::string args = "knsff --ensemble goe --dim 40 --realizations 30 --k 1,3 --seed 11 --points 200";
    REQUIRE(run_cli(args, c, "SFFLAB_WORKERS=1") == 0);
    REQUIRE(run_cli(args, d, "SFFLAB_WORKERS=5") == 0);
    for (const auto& e : fs::directory_iterator(c)) CHECK(slurp(e.path()) == slurp(d / e.path().filename()));

    const auto bad = scratch("bad");
    CHECK(run_cli("sff --ensemble gse", bad) == cli::kExitUsage);
    for (const auto& p : {a, b, c, d, bad}) fs::remove_all(p);
}
