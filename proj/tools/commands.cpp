#include "commands.hpp"

#include "crt/densities.hpp"
#include "crt/enumeration.hpp"
#include "crt/errors.hpp"
#include "crt/exact_law.hpp"
#include "crt/excursion.hpp"
#include "crt/experiments.hpp"
#include "crt/plane_tree.hpp"
#include "crt/rng.hpp"
#include "crt/skeleton.hpp"
#include "crt/unordered_tree.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace crt::cli {

namespace {

using Json = nlohmann::ordered_json;
using Params = std::vector<std::pair<std::string, std::string>>;

// Thrown when a statistical check ran correctly but failed.
struct CheckFailed {};

std::string header_line(const std::string& command, const Params& params) {
    std::string line = "# " + command;
    for (const auto& [k, v] : params) line += " " + k + "=" + v;
    return line + "\n";
}

std::string trim_spaces(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Non-blank input lines that are not '#' comments.
std::vector<std::string> read_records(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim_spaces(line);
        if (line.empty() || line.front() == '#') continue;
        out.push_back(line);
    }
    return out;
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("invalid JSON: ") + e.what());
    }
}

template <class T>
T json_get(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("JSON field '") + key + "': " + e.what());
    }
}

std::string fixed15(double v) {
    std::ostringstream os;
    os << std::setprecision(15) << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

Json skeleton_json(const Skeleton& sk) {
    Json j;
    j["shape"] = sk.shape.to_string();
    j["x"] = sk.x;
    j["y"] = sk.y;
    j["a"] = sk.a;
    return j;
}

Skeleton skeleton_from_json(const Json& j) {
    Skeleton sk;
    sk.shape = PlaneTree::parse(json_get<std::string>(j, "shape"));
    sk.x = json_get<std::vector<std::int64_t>>(j, "x");
    sk.y = json_get<std::vector<std::int64_t>>(j, "y");
    sk.a = json_get<std::int64_t>(j, "a");
    if (sk.x.size() != sk.shape.vertex_count() || sk.y.size() != sk.shape.leaf_count()) {
        throw SizeMismatch("skeleton JSON: x must have one entry per vertex and y one per leaf");
    }
    return sk;
}

std::string choice_to_string(const FiberChoice& choice) {
    std::string s;
    for (bool b : choice) s.push_back(b ? '1' : '0');
    return s;
}

FiberChoice choice_from_string(const std::string& s) {
    FiberChoice out;
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw InvalidInput("selector must be a string of 0 and 1");
        out.push_back(ch == '1');
    }
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim_spaces(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput("not a number: '" + item + "'");
        }
    }
    return out;
}

const std::vector<std::string> kFamilies{"plane", "unordered"};

// Shared state for the subcommand callbacks.
struct Context {
    std::istream& in;
    std::ostream& out;
    std::function<void()> action;
};

void add_count(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("count", "Exact number of trees with n leaves");
    auto family = std::make_shared<std::string>("plane");
    auto n = std::make_shared<std::size_t>(1);
    cmd->add_option("--family", *family, "plane or unordered")->check(CLI::IsMember(kFamilies));
    cmd->add_option("--n", *n, "number of leaves")->required()->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
    cmd->callback([&ctx, family, n] {
        ctx.action = [&ctx, family, n] {
            const CountTable table(parse_family(*family), *n);
            ctx.out << header_line("count", {{"family", *family}, {"n", std::to_string(*n)}});
            ctx.out << table.count(*n).str() << "\n";
        };
    });
}

void add_constants(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("constants", "Radius of convergence and scale constant");
    auto precision = std::make_shared<double>(1e-12);
    cmd->add_option("--precision", *precision, "target precision")->check(CLI::Range(1e-40, 1e-2));
    cmd->callback([&ctx, precision] {
        ctx.action = [&ctx, precision] {
            const Constants k = solve_rho(*precision);
            const ScaleConstant sc = compute_scale(k);
            ctx.out << header_line("constants", {{"precision", sci(*precision)}});
            ctx.out << "rho=" << fixed15(k.rho) << "\n";
            ctx.out << "c=" << fixed15(sc.c) << "\n";
            ctx.out << "rho_precision=" << sci(k.precision) << "\n";
            ctx.out << "c_precision=" << sci(sc.precision) << "\n";
            ctx.out << "identity_gap=" << sci(sc.identity_gap) << "\n";
            ctx.out << "truncation=" << k.truncation << "\n";
        };
    });
}

void add_sample(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("sample", "Uniform random trees, one per line");
    struct Opts {
        std::string family = "plane";
        std::size_t n = 1;
        std::size_t count = 1;
        std::uint64_t seed = 1;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--family", o->family)->check(CLI::IsMember(kFamilies));
    cmd->add_option("--n", o->n, "number of leaves")->required()->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
    cmd->add_option("--count", o->count, "number of trees");
    cmd->add_option("--seed", o->seed, "random seed")->required();
    cmd->callback([&ctx, o] {
        ctx.action = [&ctx, o] {
            ctx.out << header_line("sample", {{"family", o->family},
                                              {"n", std::to_string(o->n)},
                                              {"count", std::to_string(o->count)},
                                              {"seed", std::to_string(o->seed)}});
            Rng rng(o->seed, 0);
            if (parse_family(o->family) == Family::Plane) {
                for (std::size_t i = 0; i < o->count; ++i) ctx.out << sample_plane_uniform(o->n, rng).to_string() << "\n";
            } else {
                const UnorderedSampler sampler = UnorderedSampler::with_max_size(o->n);
                for (std::size_t i = 0; i < o->count; ++i) ctx.out << sampler.sample(o->n, rng).code() << "\n";
            }
        };
    });
}

void add_trim(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("trim", "a-trimming of each tree on stdin");
    auto a = std::make_shared<std::int64_t>(1);
    cmd->add_option("--a", *a, "trimming threshold")->required()->check(CLI::PositiveNumber);
    cmd->callback([&ctx, a] {
        ctx.action = [&ctx, a] {
            const auto records = read_records(ctx.in);
            ctx.out << header_line("trim", {{"a", std::to_string(*a)}});
            for (const auto& r : records) ctx.out << trim(PlaneTree::parse(r), *a).to_string() << "\n";
        };
    });
}

void add_skeleton(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("skeleton", "a-skeleton of each tree on stdin, as JSON lines");
    struct Opts {
        std::int64_t a = 1;
        std::string family = "plane";
        bool parts = false;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--a", o->a, "skeleton threshold")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--family", o->family)->check(CLI::IsMember(kFamilies));
    cmd->add_flag("--parts", o->parts, "also emit the parts needed by reconstruct");
    cmd->callback([&ctx, o] {
        ctx.action = [&ctx, o] {
            const auto records = read_records(ctx.in);
            ctx.out << header_line("skeleton", {{"a", std::to_string(o->a)},
                                                {"family", o->family},
                                                {"parts", o->parts ? "true" : "false"}});
            const bool plane = parse_family(o->family) == Family::Plane;
            for (const auto& r : records) {
                const PlaneTree t = PlaneTree::parse(r);
                Json j;
                if (plane) {
                    const PlaneDecomposition d = decompose_plane(t, o->a);
                    j = skeleton_json(d.skeleton);
                    if (o->parts) {
                        j["selector"] = choice_to_string(d.choice);
                        Json subs = Json::array();
                        for (const auto& s : d.subtrees) subs.push_back(s.to_string());
                        j["subtrees"] = subs;
                        Json forests = Json::array();
                        for (const auto& f : d.forests) forests.push_back({f.first.to_string(), f.second.to_string()});
                        j["forests"] = forests;
                    }
                } else {
                    const UnorderedDecomposition d = decompose_unordered(t, o->a);
                    j = skeleton_json(d.skeleton);
                    if (o->parts) {
                        Json subs = Json::array();
                        for (const auto& s : d.subtrees) subs.push_back(s.code());
                        j["subtrees"] = subs;
                        Json forests = Json::array();
                        for (const auto& f : d.forests) forests.push_back({f.larger.code(), f.smaller.code()});
                        j["forests"] = forests;
                    }
                }
                ctx.out << j.dump() << "\n";
            }
        };
    });
}

void add_reconstruct(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("reconstruct", "Rebuild trees from skeleton JSON lines with parts");
    auto family = std::make_shared<std::string>("plane");
    cmd->add_option("--family", *family)->check(CLI::IsMember(kFamilies));
    cmd->callback([&ctx, family] {
        ctx.action = [&ctx, family] {
            const auto records = read_records(ctx.in);
            ctx.out << header_line("reconstruct", {{"family", *family}});
            const bool plane = parse_family(*family) == Family::Plane;
            for (const auto& r : records) {
                const Json j = parse_json(r);
                const Skeleton sk = skeleton_from_json(j);
                const auto subs = json_get<std::vector<std::string>>(j, "subtrees");
                const auto forests = json_get<std::vector<std::vector<std::string>>>(j, "forests");
                for (const auto& f : forests) {
                    if (f.size() != 2) throw InvalidInput("each forest must list exactly two trees");
                }
                if (plane) {
                    std::vector<PlaneTree> subtrees;
                    for (const auto& s : subs) subtrees.push_back(PlaneTree::parse(s));
                    std::vector<TwoForest> two;
                    for (const auto& f : forests) two.push_back({PlaneTree::parse(f[0]), PlaneTree::parse(f[1])});
                    const FiberChoice choice = choice_from_string(json_get<std::string>(j, "selector"));
                    ctx.out << reconstruct_plane(sk, choice, subtrees, two).to_string() << "\n";
                } else {
                    std::vector<UnorderedTree> subtrees;
                    for (const auto& s : subs) subtrees.push_back(UnorderedTree::parse(s));
                    std::vector<UnorderedForest> two;
                    for (const auto& f : forests) two.push_back({UnorderedTree::parse(f[0]), UnorderedTree::parse(f[1])});
                    ctx.out << reconstruct_unordered(sk, subtrees, two).code() << "\n";
                }
            }
        };
    });
}

void add_contour(CLI::App& app, Context& ctx) {
    auto* enc = app.add_subcommand("contour", "Contour path of each tree on stdin");
    enc->callback([&ctx] {
        ctx.action = [&ctx] {
            const auto records = read_records(ctx.in);
            ctx.out << header_line("contour", {});
            for (const auto& r : records) ctx.out << contour(PlaneTree::parse(r)).to_string() << "\n";
        };
    });
    auto* dec = app.add_subcommand("decode", "Tree of each contour path on stdin");
    dec->callback([&ctx] {
        ctx.action = [&ctx] {
            const auto records = read_records(ctx.in);
            ctx.out << header_line("decode", {});
            for (const auto& r : records) ctx.out << decode_contour(ContourPath::parse(r)).to_string() << "\n";
        };
    });
}

void add_zeta(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("zeta", "Real skeleton of each excursion JSON line on stdin");
    auto a = std::make_shared<double>(1.0);
    cmd->add_option("--a", *a, "threshold")->required()->check(CLI::PositiveNumber);
    cmd->callback([&ctx, a] {
        ctx.action = [&ctx, a] {
            const auto records = read_records(ctx.in);
            ctx.out << header_line("zeta", {{"a", format_double(*a)}});
            for (const auto& r : records) {
                const Excursion f = Excursion::from_json(r);
                const ExcursionClass cls = in_class(f, *a);
                const RealSkeleton sk = zeta(f, *a);
                Json j;
                j["class"] = to_string(cls);
                j["shape"] = sk.shape.to_string();
                j["x"] = sk.x;
                j["y"] = sk.y;
                ctx.out << j.dump() << "\n";
            }
        };
    });
}

void add_density(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("density", "Limit densities");
    cmd->require_subcommand(1);

    auto* g = cmd->add_subcommand("g", "Stable density g(x)");
    auto gx = std::make_shared<std::string>();
    g->add_option("--x", *gx, "comma-separated points")->required();
    g->callback([&ctx, gx] {
        ctx.action = [&ctx, gx] {
            ctx.out << header_line("density g", {{"x", *gx}});
            ctx.out << "x,g\n";
            for (double x : parse_list(*gx)) ctx.out << format_double(x) << "," << format_double(g_density(x)) << "\n";
        };
    });

    auto* b = cmd->add_subcommand("b", "Pair density b_eps(y)");
    auto by = std::make_shared<std::string>();
    auto beps = std::make_shared<double>(0.3);
    b->add_option("--y", *by, "comma-separated points")->required();
    b->add_option("--eps", *beps, "epsilon")->required()->check(CLI::Range(1e-6, 1.0));
    b->callback([&ctx, by, beps] {
        ctx.action = [&ctx, by, beps] {
            ctx.out << header_line("density b", {{"eps", format_double(*beps)}, {"y", *by}});
            ctx.out << "y,b\n";
            for (double y : parse_list(*by)) ctx.out << format_double(y) << "," << format_double(b_density(y, *beps)) << "\n";
        };
    });

    struct AOpts {
        double eps = 0.3;
        std::size_t k = 0;
        std::string x;
        std::size_t stride = 100;
        double step = 1e-4;
    };
    auto* a = cmd->add_subcommand("a", "Constrained-sum densities a_1..a_k as CSV");
    auto ao = std::make_shared<AOpts>();
    a->add_option("--eps", ao->eps, "epsilon")->required()->check(CLI::Range(1e-3, 1.0));
    a->add_option("--k", ao->k, "largest index (default floor(1/eps))");
    a->add_option("--x", ao->x, "comma-separated points (default: the table grid)");
    a->add_option("--stride", ao->stride, "grid stride when dumping the table")->check(CLI::PositiveNumber);
    a->add_option("--step", ao->step, "table step; must divide eps")->check(CLI::Range(1e-6, 1e-1));
    a->callback([&ctx, ao] {
        ctx.action = [&ctx, ao] {
            const DensityContext dc = DensityContext::build(ao->eps, ao->step);
            const std::size_t k = ao->k == 0 ? dc.k_max() : ao->k;
            if (k > dc.k_max()) throw InvalidInput("--k exceeds floor(1/eps)");
            ctx.out << header_line("density a", {{"eps", format_double(ao->eps)},
                                                 {"k", std::to_string(k)},
                                                 {"step", format_double(ao->step)},
                                                 {"stride", std::to_string(ao->stride)},
                                                 {"x", ao->x.empty() ? "grid" : ao->x}});
            ctx.out << "x";
            for (std::size_t i = 1; i <= k; ++i) ctx.out << ",a" << i;
            ctx.out << "\n";
            auto row = [&](double x) {
                ctx.out << format_double(x);
                for (std::size_t i = 1; i <= k; ++i) ctx.out << "," << format_double(dc.a(i, x));
                ctx.out << "\n";
            };
            if (!ao->x.empty()) {
                for (double x : parse_list(ao->x)) row(x);
            } else {
                const std::size_t size = dc.table(1).size();
                for (std::size_t i = 0; i < size; i += ao->stride) row(dc.grid_point(i));
            }
        };
    });

    struct PsiOpts {
        double eps = 0.3;
        std::string shape;
        std::string x;
        std::string y;
        bool total = false;
    };
    auto add_psi = [&ctx, cmd](const std::string& name, bool circ) {
        auto* p = cmd->add_subcommand(name, circ ? "Unordered skeleton limit density" : "Plane skeleton limit density");
        auto po = std::make_shared<PsiOpts>();
        p->add_option("--eps", po->eps, "epsilon")->required()->check(CLI::Range(1e-3, 1.0));
        p->add_option("--shape", po->shape, "shape tree, e.g. ((oo)o)");
        p->add_option("--x", po->x, "comma-separated marks in preorder");
        p->add_option("--y", po->y, "comma-separated leaf masses");
        p->add_flag("--total", po->total, "print the total mass instead of a point value");
        p->callback([&ctx, po, name, circ] {
            ctx.action = [&ctx, po, name, circ] {
                const DensityContext dc = DensityContext::build(po->eps);
                if (po->total) {
                    ctx.out << header_line("density " + name, {{"eps", format_double(po->eps)}, {"total", "true"}});
                    ctx.out << "total=" << format_double(circ ? psi_circ_total_mass(dc) : psi_total_mass(dc)) << "\n";
                    return;
                }
                if (po->shape.empty()) throw InvalidInput("--shape is required unless --total is given");
                PsiInput input;
                input.shape = PlaneTree::parse(po->shape);
                input.x = parse_list(po->x);
                input.y = parse_list(po->y);
                ctx.out << header_line("density " + name, {{"eps", format_double(po->eps)},
                                                           {"shape", po->shape},
                                                           {"x", po->x},
                                                           {"y", po->y}});
                ctx.out << format_double(circ ? psi_circ(input, dc) : psi(input, dc)) << "\n";
            };
        });
    };
    add_psi("psi", false);
    add_psi("psicirc", true);
}

void add_oracle(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("oracle", "Exact finite-n quantities");
    cmd->require_subcommand(1);

    struct SumOpts {
        std::string family = "plane";
        std::size_t l = 1;
        std::size_t m = 1;
        std::size_t a = 1;
        std::string method = "dp";
    };
    auto* sum = cmd->add_subcommand("sum", "Constrained sum over l sizes > a adding to m");
    auto so = std::make_shared<SumOpts>();
    sum->add_option("--family", so->family)->check(CLI::IsMember(kFamilies));
    sum->add_option("--l", so->l, "number of summands")->required()->check(CLI::PositiveNumber);
    sum->add_option("--m", so->m, "total size")->required()->check(CLI::PositiveNumber);
    sum->add_option("--a", so->a, "lower bound (exclusive)")->required();
    sum->add_option("--method", so->method, "dp or ie")->check(CLI::IsMember({"dp", "ie"}));
    sum->callback([&ctx, so] {
        ctx.action = [&ctx, so] {
            const WeightKind kind = parse_family(so->family) == Family::Plane ? WeightKind::Mu : WeightKind::Nu;
            const WeightTable w = weight_table(kind, so->m);
            const double v = so->method == "dp" ? exact_constrained_sum(so->l, so->m, so->a, w)
                                                : inclusion_exclusion_sum(so->l, so->m, so->a, w);
            ctx.out << header_line("oracle sum", {{"family", so->family},
                                                  {"l", std::to_string(so->l)},
                                                  {"m", std::to_string(so->m)},
                                                  {"a", std::to_string(so->a)},
                                                  {"method", so->method}});
            ctx.out << format_double(v) << "\n";
        };
    });

    struct LawOpts {
        std::string family = "plane";
        std::size_t n = 1;
        std::size_t a = 1;
    };
    auto* law = cmd->add_subcommand("skeleton-law", "Exact probability of each skeleton JSON line on stdin");
    auto lo = std::make_shared<LawOpts>();
    law->add_option("--family", lo->family)->check(CLI::IsMember(kFamilies));
    law->add_option("--n", lo->n, "number of leaves")->required()->check(CLI::PositiveNumber);
    law->add_option("--a", lo->a, "skeleton threshold")->required()->check(CLI::PositiveNumber);
    law->callback([&ctx, lo] {
        ctx.action = [&ctx, lo] {
            const auto records = read_records(ctx.in);
            const SkeletonLaw model(parse_family(lo->family), lo->n, lo->a);
            ctx.out << header_line("oracle skeleton-law", {{"family", lo->family},
                                                           {"n", std::to_string(lo->n)},
                                                           {"a", std::to_string(lo->a)}});
            for (const auto& r : records) ctx.out << format_double(model.probability(skeleton_from_json(parse_json(r)))) << "\n";
        };
    });
}

struct ExperimentCommon {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t batch_size = 10000;
    std::string format = "text";
    std::string output;
};

void add_experiment_common(CLI::App* cmd, ExperimentCommon& c) {
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1U, 256U));
    cmd->add_option("--batch-size", c.batch_size, "samples per batch")->check(CLI::PositiveNumber);
    cmd->add_option("--format", c.format, "json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}));
    cmd->add_option("--output", c.output, "output path (default stdout)");
}

void emit_report(Context& ctx, const ExperimentCommon& c, ExperimentReport report) {
    report.parameter("threads", std::to_string(c.threads));
    std::string body;
    if (c.format == "json") {
        body = report.to_json();
    } else {
        Params params = report.parameters;
        body = header_line("experiment " + report.name, params);
        body += c.format == "csv" ? report.to_csv() : report.to_text();
    }
    if (c.output.empty()) {
        ctx.out << body;
    } else {
        std::ofstream file(c.output, std::ios::binary);
        if (!file) throw InvalidInput("cannot open output file: " + c.output);
        file << body;
        if (!file) throw InvalidInput("cannot write output file: " + c.output);
    }
    if (!report.pass) throw CheckFailed{};
}

RunOptions run_options(const ExperimentCommon& c) {
    RunOptions o;
    o.seed = c.seed;
    o.threads = c.threads;
    o.batch_size = c.batch_size;
    return o;
}

void add_experiment(CLI::App& app, Context& ctx) {
    auto* cmd = app.add_subcommand("experiment", "Statistical experiments");
    cmd->require_subcommand(1);

    {
        struct Opts {
            ExperimentCommon common;
            LocalLimitConfig config;
            std::string family = "plane";
        };
        auto o = std::make_shared<Opts>();
        auto* sub = cmd->add_subcommand("local-limit", "Skeleton cell frequencies against the exact law and the limit");
        add_experiment_common(sub, o->common);
        sub->add_option("--family", o->family)->check(CLI::IsMember(kFamilies));
        sub->add_option("--n", o->config.n, "number of leaves")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 22));
        sub->add_option("--eps", o->config.epsilon, "epsilon")->check(CLI::Range(1e-3, 1.0));
        sub->add_option("--samples", o->config.samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
        sub->add_option("--z-tol", o->config.z_tolerance, "largest allowed |z| against the exact law");
        sub->add_option("--limit-tol", o->config.limit_tolerance, "largest relative gap to the limit density");
        sub->callback([&ctx, o] {
            ctx.action = [&ctx, o] {
                o->config.family = parse_family(o->family);
                emit_report(ctx, o->common, exp_local_limit(o->config, run_options(o->common)));
            };
        });
    }
    {
        struct Opts {
            ExperimentCommon common;
            HeightLawConfig config;
            std::string family = "plane";
        };
        auto o = std::make_shared<Opts>();
        auto* sub = cmd->add_subcommand("height", "Height law against the theta series");
        add_experiment_common(sub, o->common);
        sub->add_option("--family", o->family)->check(CLI::IsMember(kFamilies));
        sub->add_option("--n", o->config.n, "number of leaves")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 22));
        sub->add_option("--samples", o->config.samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
        sub->add_option("--ks-tol", o->config.ks_tolerance, "largest allowed KS distance");
        sub->callback([&ctx, o] {
            ctx.action = [&ctx, o] {
                o->config.family = parse_family(o->family);
                emit_report(ctx, o->common, exp_height_law(o->config, run_options(o->common)));
            };
        });
    }
    {
        auto common = std::make_shared<ExperimentCommon>();
        auto* sub = cmd->add_subcommand("mean-height", "Exact mean heights at small n");
        add_experiment_common(sub, *common);
        sub->callback([&ctx, common] {
            ctx.action = [&ctx, common] { emit_report(ctx, *common, exp_mean_height_exact()); };
        });
    }
    {
        struct Opts {
            ExperimentCommon common;
            TightnessConfig config;
        };
        auto o = std::make_shared<Opts>();
        auto* sub = cmd->add_subcommand("tightness", "Trimming tightness for unordered trees");
        add_experiment_common(sub, o->common);
        sub->add_option("--n", o->config.n, "number of leaves")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 22));
        sub->add_option("--eps", o->config.epsilons, "epsilons, decreasing")->delimiter(',');
        sub->add_option("--samples", o->config.samples, "samples per epsilon")->check(CLI::PositiveNumber);
        sub->add_option("--moment-sizes", o->config.moment_sizes, "sizes for the fourth moment")->delimiter(',');
        sub->add_option("--moment-samples", o->config.moment_samples, "samples per size")->check(CLI::PositiveNumber);
        sub->add_option("--moment-band", o->config.moment_band, "largest allowed ratio of fourth moments");
        sub->callback([&ctx, o] {
            ctx.action = [&ctx, o] { emit_report(ctx, o->common, exp_trim_tightness(o->config, run_options(o->common))); };
        });
    }
    {
        struct Opts {
            ExperimentCommon common;
            ConvergenceConfig config;
        };
        auto o = std::make_shared<Opts>();
        auto* sub = cmd->add_subcommand("skeleton-convergence", "Plane, unordered and excursion skeleton summaries");
        add_experiment_common(sub, o->common);
        sub->add_option("--n", o->config.n, "number of leaves")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 22));
        sub->add_option("--eps", o->config.epsilon, "epsilon")->check(CLI::Range(1e-3, 1.0));
        sub->add_option("--samples", o->config.samples, "tree samples per family")->check(CLI::PositiveNumber);
        sub->add_option("--excursion-samples", o->config.excursion_samples, "excursion samples")->check(CLI::PositiveNumber);
        sub->callback([&ctx, o] {
            ctx.action = [&ctx, o] {
                emit_report(ctx, o->common, exp_skeleton_convergence(o->config, run_options(o->common)));
            };
        });
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app("Skeletons of random binary trees", "crt");
    app.require_subcommand(1);
    Context ctx{in, out, {}};
    add_count(app, ctx);
    add_constants(app, ctx);
    add_sample(app, ctx);
    add_trim(app, ctx);
    add_skeleton(app, ctx);
    add_reconstruct(app, ctx);
    add_contour(app, ctx);
    add_zeta(app, ctx);
    add_density(app, ctx);
    add_oracle(app, ctx);
    add_experiment(app, ctx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    if (!ctx.action) {
        err << "error: no command given\n";
        return kInputError;
    }
    try {
        ctx.action();
        out.flush();
    } catch (const CheckFailed&) {
        out.flush();
        return kCheckFailed;
    } catch (const std::exception& e) {
        out.flush();
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}

}  // namespace crt::cli
