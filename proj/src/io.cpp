#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mdprl {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw InvalidInputError(path + ": " + e.what());
    }
    return doc;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

VectorXd read_vector(const json& doc, const std::string& key, int expected) {
    if (!doc.contains(key)) throw InvalidInputError("missing field: " + key);
    const auto& arr = doc.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != expected) {
        std::ostringstream os;
        os << "field " << key << ": expected array of length " << expected;
        throw InvalidInputError(os.str());
    }
    VectorXd out(expected);
    for (int i = 0; i < expected; ++i) out(i) = arr[i].get<double>();
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json vector_json(const VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json matrix_json_row_major(const MatrixXd& m) {
    json arr = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
    return arr;
}

MatrixXd read_matrix_row_major(const json& arr, int rows, int cols,
                               const std::string& key) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols) {
        std::ostringstream os;
        os << "field " << key << ": expected flat array of length " << rows * cols;
        throw InvalidInputError(os.str());
    }
    MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = arr[i * cols + j].get<double>();
    return out;
}

}  // namespace

TabularMdp load_mdp(const std::string& path) {
    const json doc = parse_file(path);
    TabularMdp mdp;
    try {
        if (!doc.contains("num_states") || !doc.contains("num_actions") ||
            !doc.contains("gamma"))
            throw InvalidInputError(path + ": missing num_states/num_actions/gamma");
        mdp.num_states = doc.at("num_states").get<int>();
        mdp.num_actions = doc.at("num_actions").get<int>();
        mdp.gamma = doc.at("gamma").get<double>();
        if (mdp.num_states < 1 || mdp.num_actions < 1)
            throw InvalidInputError(path + ": num_states/num_actions must be >= 1");
        const int S = mdp.num_states;
        const int SA = S * mdp.num_actions;
        mdp.initial = read_vector(doc, "initial", S);
        mdp.reward = read_vector(doc, "reward", SA);
        if (!doc.contains("transition"))
            throw InvalidInputError(path + ": missing field: transition");
        const auto& trans = doc.at("transition");
        // Canonical form is S*A rows of length S; a flat array of length
        // S*A*S in the same order is accepted too.
        if (trans.is_array() && !trans.empty() && trans[0].is_array()) {
            if (static_cast<int>(trans.size()) != SA)
                throw InvalidInputError(path + ": transition needs S*A rows");
            mdp.transition.resize(SA, S);
            for (int i = 0; i < SA; ++i) {
                const auto& row = trans[i];
                if (!row.is_array() || static_cast<int>(row.size()) != S)
                    throw InvalidInputError(path + ": transition rows need length S");
                for (int j = 0; j < S; ++j)
                    mdp.transition(i, j) = row[j].get<double>();
            }
        } else {
            mdp.transition = read_matrix_row_major(trans, SA, S, "transition");
        }
    } catch (const json::exception& e) {
        throw InvalidInputError(path + ": " + e.what());
    }
    const auto bad = validate(mdp);
    if (!bad.empty()) throw InvalidInputError(path + ": " + bad.front());
    mdp.finalize();
    return mdp;
}

void save_mdp(const std::string& path, const TabularMdp& mdp) {
    json doc;
    doc["num_states"] = mdp.num_states;
    doc["num_actions"] = mdp.num_actions;
    doc["gamma"] = mdp.gamma;
    doc["initial"] = vector_json(mdp.initial);
    doc["reward"] = vector_json(mdp.reward);
    json rows = json::array();
    for (int i = 0; i < mdp.transition.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < mdp.transition.cols(); ++j)
            row.push_back(mdp.transition(i, j));
        rows.push_back(std::move(row));
    }
    doc["transition"] = std::move(rows);
    write_file(path, doc.dump(2) + "\n");
}

FeatureBasis load_basis(const std::string& path, int num_states, int num_actions) {
    const json doc = parse_file(path);
    FeatureBasis basis;
    try {
        const int d_v = doc.at("d_v").get<int>();
        const int d_mu = doc.at("d_mu").get<int>();
        if (d_v < 1 || d_mu < 1)
            throw InvalidInputError(path + ": d_v and d_mu must be >= 1");
        const auto& psi = doc.at("psi");
        if (psi.is_string()) {
            const std::string name = psi.get<std::string>();
            FeatureBasis generated;
            if (name == "tabular") {
                generated = tabular_basis(num_states, num_actions);
            } else if (name.rfind("state-aggregation:", 0) == 0) {
                const int k = std::stoi(name.substr(18));
                generated = state_aggregation_basis(num_states, num_actions, k);
            } else {
                throw InvalidInputError(path + ": unknown psi generator '" + name + "'");
            }
            if (generated.d_v() != d_v || generated.d_mu() != d_mu)
                throw InvalidInputError(path + ": d_v/d_mu do not match generator");
            if (doc.contains("phi"))
                generated.phi =
                    read_matrix_row_major(doc.at("phi"), num_states, d_v, "phi");
            basis = std::move(generated);
        } else {
            basis.phi = read_matrix_row_major(doc.at("phi"), num_states, d_v, "phi");
            basis.psi =
                read_matrix_row_major(psi, num_states * num_actions, d_mu, "psi");
            basis.finalize();
        }
    } catch (const json::exception& e) {
        throw InvalidInputError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InvalidInputError(path + ": " + e.what());
    }
    const auto bad = validate_basis(basis);
    if (!bad.empty()) throw InvalidInputError(path + ": " + bad.front());
    return basis;
}

void save_basis(const std::string& path, const FeatureBasis& basis) {
    json doc;
    doc["d_v"] = basis.d_v();
    doc["d_mu"] = basis.d_mu();
    doc["phi"] = matrix_json_row_major(basis.phi);
    doc["psi"] = matrix_json_row_major(basis.psi);
    write_file(path, doc.dump(2) + "\n");
}

SweepSpec load_sweep_spec(const std::string& path) {
    const json doc = parse_file(path);
    SweepSpec spec;
    try {
        spec.generator = doc.at("generator").get<std::string>();
        if (doc.contains("gamma")) spec.gamma = doc.at("gamma").get<double>();
        if (doc.contains("num_states"))
            spec.num_states = doc.at("num_states").get<int>();
        if (doc.contains("num_actions"))
            spec.num_actions = doc.at("num_actions").get<int>();
        if (doc.contains("branching")) spec.branching = doc.at("branching").get<int>();
        if (doc.contains("width")) spec.width = doc.at("width").get<int>();
        if (doc.contains("height")) spec.height = doc.at("height").get<int>();
        if (doc.contains("slip")) spec.slip = doc.at("slip").get<double>();
        for (const auto& n : doc.at("steps"))
            spec.steps_list.push_back(n.get<long long>());
        for (const auto& s : doc.at("seeds"))
            spec.seeds.push_back(s.get<std::uint64_t>());
        if (doc.contains("features")) spec.use_features = doc.at("features").get<bool>();
        if (doc.contains("c_v")) spec.c_v = doc.at("c_v").get<double>();
        if (doc.contains("workers")) spec.workers = doc.at("workers").get<int>();
    } catch (const json::exception& e) {
        throw InvalidInputError(path + ": " + e.what());
    }
    if (spec.steps_list.empty())
        throw InvalidInputError(path + ": empty steps list");
    if (spec.seeds.empty()) throw InvalidInputError(path + ": empty seeds list");
    return spec;
}

std::string format_metrics_csv(const std::vector<SweepRecord>& records,
                               const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << "# " << comment << "\n";
    os << "run_id,seed,n,eta,value_gap,residual_cert,queries,elapsed_ms\n";
    for (const auto& r : records) {
        os << r.run_id << ',' << r.seed << ',' << r.n << ',' << fmt(r.eta) << ','
           << fmt(r.value_gap) << ',' << fmt(r.residual_cert) << ',' << r.queries
           << ",0\n";
    }
    return os.str();
}

void write_metrics_csv(const std::string& path,
                       const std::vector<SweepRecord>& records,
                       const std::string& comment) {
    write_file(path, format_metrics_csv(records, comment));
}

void write_policy(const std::string& path, const Policy& policy) {
    std::ostringstream os;
    for (int s = 0; s < policy.probs.rows(); ++s) {
        for (int a = 0; a < policy.probs.cols(); ++a) {
            if (a) os << ' ';
            os << fmt(policy.probs(s, a));
        }
        os << '\n';
    }
    write_file(path, os.str());
}

}  // namespace mdprl
