#include "vqvi/mdp_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vqvi {

using json = nlohmann::ordered_json;

std::string to_json(const Dmdp& mdp) {
    const std::size_t n = mdp.n_states();
    const std::size_t m = mdp.n_actions();
    json reward = json::array();
    json transition = json::array();
    for (std::size_t s = 0; s < n; ++s) {
        json r_row = json::array();
        json p_block = json::array();
        for (std::size_t a = 0; a < m; ++a) {
            r_row.push_back(mdp.reward(s, a));
            const auto p = mdp.row(s, a);
            p_block.push_back(json(std::vector<double>(p.begin(), p.end())));
        }
        reward.push_back(std::move(r_row));
        transition.push_back(std::move(p_block));
    }
    json doc;
    doc["n_states"] = n;
    doc["n_actions"] = m;
    doc["gamma"] = mdp.gamma();
    doc["reward"] = std::move(reward);
    doc["transition"] = std::move(transition);
    return doc.dump();
}

namespace {

const json& field(const json& doc, const char* name) {
    auto it = doc.find(name);
    if (it == doc.end()) throw MdpFormatError(std::string("missing field '") + name + "'");
    return *it;
}

double finite_number(const json& x, const std::string& where) {
    if (!x.is_number()) throw MdpFormatError(where + " is not a number");
    const double v = x.get<double>();
    if (!std::isfinite(v)) throw MdpFormatError(where + " is not finite");
    return v;
}

std::size_t positive_count(const json& x, const char* name) {
    if (!x.is_number_integer() || x.get<long long>() <= 0)
        throw MdpFormatError(std::string("field '") + name + "' must be a positive integer");
    return x.get<std::size_t>();
}

void expect_array(const json& x, std::size_t len, const std::string& where) {
    if (!x.is_array()) throw MdpFormatError(where + " is not an array");
    if (x.size() != len)
        throw MdpFormatError(where + " has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(len));
}

}  // namespace

Dmdp from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw MdpFormatError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MdpFormatError("document is not a JSON object");

    const std::size_t n = positive_count(field(doc, "n_states"), "n_states");
    const std::size_t m = positive_count(field(doc, "n_actions"), "n_actions");
    const double gamma = finite_number(field(doc, "gamma"), "field 'gamma'");

    const json& reward = field(doc, "reward");
    const json& transition = field(doc, "transition");
    expect_array(reward, n, "reward");
    expect_array(transition, n, "transition");

    std::vector<double> r(n * m);
    std::vector<double> p(n * m * n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::string rs = "reward[" + std::to_string(s) + "]";
        expect_array(reward[s], m, rs);
        const std::string ps = "transition[" + std::to_string(s) + "]";
        expect_array(transition[s], m, ps);
        for (std::size_t a = 0; a < m; ++a) {
            r[s * m + a] = finite_number(reward[s][a], rs + "[" + std::to_string(a) + "]");
            const std::string pa = ps + "[" + std::to_string(a) + "]";
            expect_array(transition[s][a], n, pa);
            for (std::size_t t = 0; t < n; ++t)
                p[(s * m + a) * n + t] =
                    finite_number(transition[s][a][t], pa + "[" + std::to_string(t) + "]");
        }
    }

    Dmdp mdp(n, m, gamma, std::move(r), std::move(p));
    const auto violations = validate(mdp);
    if (!violations.empty()) {
        std::string msg = "invalid model:";
        for (const auto& v : violations) msg += " " + v.message + ";";
        throw MdpFormatError(msg);
    }
    return mdp;
}

void save(const Dmdp& mdp, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << to_json(mdp) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Dmdp load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MdpFormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace vqvi
