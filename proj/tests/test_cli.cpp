#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Output {
    std::string out;
    int status = -1;
};

// Runs the CLI through the shell with the given arguments and optional stdin.
Output run(const std::string& args, const std::string& input = "") {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "crt_test_cli";
    std::filesystem::create_directories(dir);
    const auto in_path = dir / ("in" + std::to_string(counter++) + ".txt");
    {
        std::ofstream in(in_path);
        in << input;
    }
    const std::string command =
        std::string(CRT_CLI_PATH) + " " + args + " < " + in_path.string() + " 2>/dev/null";
    Output result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer{};
    std::size_t read = 0;
    while ((read = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.out.append(buffer.data(), read);
    const int raw = pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::filesystem::remove(in_path);
    return result;
}

// Output lines that are not header comments.
std::vector<std::string> body(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("count prints the exact count and a parameter header") {
    const auto r = run("count --family unordered --n 12");
    CHECK(r.status == 0);
    CHECK(first_line(r.out) == "# count family=unordered n=12");
    CHECK(body(r.out) == std::vector<std::string>{"451"});
    CHECK(body(run("count --family plane --n 10").out) == std::vector<std::string>{"4862"});
}

TEST_CASE("constants") {
    const auto r = run("constants --precision 1e-8");
    CHECK(r.status == 0);
    CHECK(r.out.find("c=1.1300337") != std::string::npos);
    CHECK(r.out.find("rho=0.4026975") != std::string::npos);
}

TEST_CASE("trim at a = 1 echoes its input") {
    const std::string trees = "((oo)o)\n(((oo)(oo))o)\no\n";
    const auto r = run("trim --a 1", trees);
    CHECK(r.status == 0);
    CHECK(body(r.out) == body(trees));
    CHECK(body(run("trim --a 2", "(((oo)(oo))o)\n").out) == std::vector<std::string>{"((oo)o)"});
}

TEST_CASE("sample, skeleton and reconstruct round trip for both families") {
    for (const std::string family : {"plane", "unordered"}) {
        const auto sampled = run("sample --family " + family + " --n 14 --count 40 --seed 9");
        REQUIRE(sampled.status == 0);
        const auto trees = body(sampled.out);
        REQUIRE(trees.size() == 40);
        // keep the unordered trees that are 4-good
        std::string kept;
        std::vector<std::string> expected;
        for (const auto& t : trees) {
            const auto sk = run("skeleton --a 4 --family " + family + " --parts", t + "\n");
            if (sk.status != 0) continue;
            kept += body(sk.out).front() + "\n";
            expected.push_back(t);
        }
        CHECK(expected.size() >= (family == "plane" ? 40u : 10u));
        const auto rebuilt = run("reconstruct --family " + family, kept);
        CHECK(rebuilt.status == 0);
        CHECK(body(rebuilt.out) == expected);
    }
}

TEST_CASE("contour and decode are inverse") {
    const auto trees = body(run("sample --family plane --n 9 --count 20 --seed 2").out);
    std::string joined;
    for (const auto& t : trees) joined += t + "\n";
    const auto paths = run("contour", joined);
    CHECK(paths.status == 0);
    std::string path_text;
    for (const auto& p : body(paths.out)) path_text += p + "\n";
    CHECK(body(run("decode", path_text).out) == trees);
    CHECK(run("decode", "+-+\n").status == 1);
}

TEST_CASE("zeta of a tent excursion") {
    const auto r = run("zeta --a 0.5", R"({"f":[0,1,0],"t":[0,1,2]})" "\n");
    CHECK(r.status == 0);
    const auto json = nlohmann::json::parse(body(r.out).front());
    CHECK(json["shape"] == "o");
    CHECK(json["x"][0].get<double>() == doctest::Approx(0.75));
    CHECK(json["y"][0].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("density and oracle commands") {
    const auto g = body(run("density g --x 0.25").out);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == "x,g");
    CHECK(std::stod(g[1].substr(g[1].find(',') + 1)) == doctest::Approx(0.8302149948411895));
    const auto a = body(run("density a --eps 0.3 --k 2 --stride 3000").out);
    CHECK(a.front() == "x,a1,a2");
    CHECK(run("density b --y 0.2 --eps 0.3").status == 1);
    const auto total = run("density psi --eps 0.4 --total");
    CHECK(total.status == 0);
    const std::string line = body(total.out).front();
    CHECK(std::abs(std::stod(line.substr(line.find('=') + 1)) - 1.0) <= 0.02);

    const auto dp = body(run("oracle sum --family unordered --l 4 --m 30 --a 12 --method dp").out);
    const auto ie = body(run("oracle sum --family unordered --l 4 --m 30 --a 12 --method ie").out);
    REQUIRE(dp.size() == 1);
    REQUIRE(ie.size() == 1);
    CHECK(std::abs(std::stod(dp[0]) - std::stod(ie[0])) <= 1e-12);

    const auto law = run("oracle skeleton-law --family plane --n 10 --a 3", R"({"shape":"o","x":[2],"y":[5],"a":3})" "\n");
    CHECK(law.status == 0);
    CHECK(std::stod(body(law.out).front()) > 0.0);
}

TEST_CASE("exit codes") {
    CHECK(run("count --family unordered --n 12 --bogus 1").status == 1);
    CHECK(run("count --family ternary --n 12").status == 1);
    CHECK(run("nonsense").status == 1);
    CHECK(run("trim --a 2", "((oo)\n").status == 1);
    CHECK(run("sample --family plane --n 5 --count 2").status == 1);  // seed is required
    CHECK(run("--help").status == 0);
    CHECK(run("experiment mean-height").status == 0);
    // a statistical check that cannot pass at this size
    CHECK(run("experiment height --family plane --n 100 --samples 500 --seed 1").status == 2);
}

TEST_CASE("seeded commands are byte reproducible") {
    for (const std::string args :
         {"sample --family unordered --n 30 --count 20 --seed 5", "sample --family plane --n 30 --count 20 --seed 5",
          "experiment height --family unordered --n 200 --samples 2000 --seed 3 --format json",
          "experiment local-limit --n 500 --samples 2000 --seed 3 --format csv --threads 2 --batch-size 300"}) {
        const auto first = run(args);
        const auto second = run(args);
        CHECK(first.out == second.out);
        CHECK_FALSE(first.out.empty());
    }
    CHECK(run("sample --family plane --n 30 --count 5 --seed 5").out !=
          run("sample --family plane --n 30 --count 5 --seed 6").out);
}

TEST_CASE("experiment output to a file") {
    const auto path = std::filesystem::temp_directory_path() / "crt_test_cli" / "report.json";
    std::filesystem::remove(path);
    const auto r = run("experiment mean-height --format json --output " + path.string());
    CHECK(r.status == 0);
    std::ifstream in(path);
    const auto json = nlohmann::json::parse(in);
    CHECK(json["name"] == "mean-height");
    CHECK(json["pass"] == true);
}
