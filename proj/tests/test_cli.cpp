#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result lab(const std::string& args)
{
    const std::string cmd = std::string(GFBM_LAB_EXE) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);)
        v.push_back(l);
    return v;
}

std::size_t columns(const std::string& line) { return std::count(line.begin(), line.end(), ',') + 1; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "gfbm_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Cli, Classify)
{
    const Result r = lab("classify --alpha 0.7 --gamma 0.5");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["region"], "I");
    EXPECT_NEAR(j["H"].get<double>(), 0.95, 1e-12);
    EXPECT_EQ(j["x_is_semimartingale"], "yes");
}

TEST(Cli, DomainErrorsExitTwo)
{
    const Result r = lab("classify --alpha 0.9 --gamma 0.1");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("(1+gamma)/2"), std::string::npos) << r.out;
    EXPECT_EQ(lab("").code, 2);
    EXPECT_EQ(lab("no-such-command").code, 2);
    EXPECT_EQ(lab("simulate --alpha 0.2").code, 2);
    EXPECT_EQ(lab("table1 --side c").code, 2);
}

TEST(Cli, HelpAndVersion)
{
    const Result h = lab("--help");
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("vvix-surface"), std::string::npos);
    const Result v = lab("--version");
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, SimulateShapeAndDeterminism)
{
    const std::string args = "simulate --alpha 0.2 --gamma 0.3 --n 64 --paths 5 --seed 7";
    const Result a = lab(args);
    ASSERT_EQ(a.code, 0) << a.out;
    const auto l = lines(a.out);
    ASSERT_EQ(l.size(), 66u);
    EXPECT_EQ(l[0], "t,path_0,path_1,path_2,path_3,path_4");
    for (const auto& row : l)
        EXPECT_EQ(columns(row), 6u);
    EXPECT_EQ(lab(args).out, a.out);
    EXPECT_NE(lab("simulate --alpha 0.2 --gamma 0.3 --n 64 --paths 5 --seed 8").out, a.out);
}

TEST(Cli, FileOutputWritesMetadata)
{
    const fs::path out = scratch("sim.csv");
    fs::remove(out);
    fs::remove(out.string() + ".meta.json");
    const Result r = lab("simulate --alpha 0.7 --gamma 0.5 --n 16 --paths 2 --seed 11 --process mixed -o " + out.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(lines(slurp(out)).size(), 18u);
    const auto meta = nlohmann::json::parse(slurp(out.string() + ".meta.json"));
    EXPECT_EQ(meta["command"], "simulate");
    EXPECT_EQ(meta["seed"], 11);
    EXPECT_TRUE(meta.contains("versions"));
    EXPECT_TRUE(meta.contains("runtime_seconds"));
    EXPECT_EQ(meta["config"]["process"], "mixed");
}

TEST(Cli, ConfigFileMatchesFlags)
{
    const fs::path cfg = scratch("sim.ini");
    {
        std::ofstream f(cfg);
        f << "[simulate]\nalpha=0.2\ngamma=0.3\nn=16\npaths=3\nseed=5\n";
    }
    const Result a = lab("--config " + cfg.string() + " simulate");
    const Result b = lab("simulate --alpha 0.2 --gamma 0.3 --n 16 --paths 3 --seed 5");
    ASSERT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, Table1)
{
    const Result a = lab("table1 --side a");
    ASSERT_EQ(a.code, 0);
    const auto la = lines(a.out);
    ASSERT_EQ(la.size(), 7u);
    EXPECT_EQ(la[0], "alpha,gamma,H,f,v");
    const Result b = lab("table1 --side b");
    const auto lb = lines(b.out);
    ASSERT_EQ(lb.size(), 7u);
    EXPECT_EQ(lb[0], "alpha,gamma,H,f,v_formula,v_paper,v_paper_discrepancy");
    const Result j = lab("table1 --side a --format json");
    const auto arr = nlohmann::json::parse(j.out)["rows"];
    ASSERT_EQ(arr.size(), 6u);
    EXPECT_NEAR(arr[0]["f"].get<double>(), 0.2413, 0.01 * 0.2413);
}

TEST(Cli, VvixSurfaceDefaultSweep)
{
    const Result r = lab("vvix-surface --H 0.05 --t 0.5 --T 1");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 101u);
    EXPECT_EQ(l[0], "alpha,gamma,t,T,v");
}

TEST(Cli, VariationAndShotNoise)
{
    const Result v = lab("variation --alpha 0.4 --gamma 0.3 --p 2 1.5 --n 8 16 32 --paths 10 --seed 3");
    ASSERT_EQ(v.code, 0) << v.out;
    const auto lv = lines(v.out);
    ASSERT_EQ(lv.size(), 7u);
    EXPECT_EQ(lv[0], "p,n,mean,std_error,expected,regime");
    EXPECT_EQ(lab("variation --alpha 0.4 --gamma 0.3 --n 8 12").code, 2);

    const Result s = lab("shotnoise --n 8 --paths 4 --seed 2");
    ASSERT_EQ(s.code, 0) << s.out;
    const auto ls = lines(s.out);
    ASSERT_EQ(ls.size(), 10u);
    EXPECT_EQ(columns(ls[0]), 5u);
}

TEST(Cli, WienerHopfAndPrice)
{
    const fs::path out = scratch("wh.csv");
    const Result w = lab("wiener-hopf --alpha 0.4 --gamma 0.3 --nodes 16 --volterra-steps 8 -o " + out.string());
    ASSERT_EQ(w.code, 0) << w.out;
    EXPECT_TRUE(fs::exists(out.string() + ".volterra.csv"));
    const auto meta = nlohmann::json::parse(slurp(out.string() + ".meta.json"));
    EXPECT_LT(meta["report"]["residual_norm"].get<double>(), 1e-6);
    EXPECT_EQ(lab("wiener-hopf --alpha 0.1 --gamma 0.5").code, 2);

    const Result p = lab("price --alpha 0.4 --gamma 0.3 --n 16 --nodes 16 --paths 500 --seed 4");
    ASSERT_EQ(p.code, 0) << p.out;
    const auto j = nlohmann::json::parse(p.out);
    for (const char* key : {"estimate", "stderr", "n_paths", "seed", "params"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["n_paths"], 500);

    const Result a = lab("price --mode arbitrage --alpha 0.2 --gamma 0.3 --n 256 --paths 5 --seed 4");
    ASSERT_EQ(a.code, 0) << a.out;
    EXPECT_TRUE(nlohmann::json::parse(a.out).contains("monotone_fraction"));
}
