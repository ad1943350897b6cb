#include "carma/json_io.hpp"

#include <stdexcept>

namespace carma::io {

json matrix_to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::domain_error("matrix json: expected nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::domain_error("matrix json: ragged rows");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<size_t>(k)).get<double>();
    }
    return m;
}

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw std::domain_error("vector json: expected array");
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<size_t>(i)).get<double>();
    return v;
}

namespace {

json jump_to_json(const JumpPart& jump) {
    if (std::holds_alternative<JumpNone>(jump)) return json{{"type", "none"}};
    if (const auto* p = std::get_if<JumpPoisson>(&jump))
        return json{{"type", "poisson"}, {"rate", p->rate}, {"jump", vector_to_json(p->jump)}};
    const auto& c = std::get<JumpCompoundPoisson>(jump);
    json dist;
    if (const auto* f = std::get_if<JumpDistFixed>(&c.dist))
        dist = json{{"type", "fixed"}, {"value", vector_to_json(f->value)}};
    else if (const auto* nd = std::get_if<JumpDistNormal>(&c.dist))
        dist = json{{"type", "normal"}, {"mean", vector_to_json(nd->mean)}, {"cov", matrix_to_json(nd->cov)}};
    else
        dist = json{{"type", "exponential"}, {"rate", std::get<JumpDistExponential>(c.dist).rate}};
    return json{{"type", "compound_poisson"}, {"rate", c.rate}, {"jump_dist", std::move(dist)}};
}

JumpPart jump_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "none") return JumpNone{};
    if (type == "poisson")
        return JumpPoisson{j.at("rate").get<double>(), vector_from_json(j.at("jump"))};
    if (type == "compound_poisson") {
        const auto& dj = j.at("jump_dist");
        const std::string dt = dj.at("type").get<std::string>();
        JumpDist dist;
        if (dt == "fixed")
            dist = JumpDistFixed{vector_from_json(dj.at("value"))};
        else if (dt == "normal")
            dist = JumpDistNormal{vector_from_json(dj.at("mean")), matrix_from_json(dj.at("cov"))};
        else if (dt == "exponential")
            dist = JumpDistExponential{dj.at("rate").get<double>()};
        else
            throw std::domain_error("levy json: unknown jump distribution '" + dt + "'");
        return JumpCompoundPoisson{j.at("rate").get<double>(), std::move(dist)};
    }
    throw std::domain_error("levy json: unknown jump type '" + type + "'");
}

}  // namespace

json to_json(const LevyModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LevyTriplet>) {
                return json{{"family", "triplet"},
                            {"params",
                             {{"gamma", vector_to_json(m.gamma)},
                              {"sigma_g", matrix_to_json(m.sigma_g)},
                              {"jump", jump_to_json(m.jump)}}}};
            } else if constexpr (std::is_same_v<T, GammaLevy>) {
                return json{{"family", "gamma"}, {"params", {{"gamma", m.g}}}};
            } else if constexpr (std::is_same_v<T, NigLevy>) {
                json params{{"delta", m.delta},
                            {"kappa", m.kappa},
                            {"beta", vector_to_json(m.beta)},
                            {"Delta", matrix_to_json(m.delta_mat)}};
                if (m.mu.size() > 0) params["mu"] = vector_to_json(m.mu);
                return json{{"family", "nig"}, {"params", std::move(params)}};
            } else if constexpr (std::is_same_v<T, StableLevy>) {
                return json{{"family", "stable"},
                            {"params",
                             {{"alpha", m.alpha},
                              {"scale", m.scale},
                              {"skew", m.skew},
                              {"location", m.location}}}};
            } else {
                json comps = json::array();
                for (const auto& c : m.components) comps.push_back(to_json(c));
                return json{{"family", "sum"}, {"params", {{"components", std::move(comps)}}}};
            }
        },
        model.spec);
}

LevyModel levy_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    const json& p = j.at("params");
    LevyModel model;
    if (family == "triplet") {
        model.spec = LevyTriplet{vector_from_json(p.at("gamma")), matrix_from_json(p.at("sigma_g")),
                                 jump_from_json(p.at("jump"))};
    } else if (family == "gamma") {
        model.spec = GammaLevy{p.at("gamma").get<double>()};
    } else if (family == "nig") {
        NigLevy nig;
        nig.delta = p.at("delta").get<double>();
        nig.kappa = p.at("kappa").get<double>();
        nig.beta = vector_from_json(p.at("beta"));
        nig.delta_mat = matrix_from_json(p.at("Delta"));
        if (p.contains("mu")) nig.mu = vector_from_json(p.at("mu"));
        model.spec = std::move(nig);
    } else if (family == "stable") {
        model.spec = StableLevy{p.at("alpha").get<double>(), p.at("scale").get<double>(),
                                p.at("skew").get<double>(), p.at("location").get<double>()};
    } else if (family == "sum") {
        SumLevy sum;
        for (const auto& c : p.at("components")) sum.components.push_back(levy_from_json(c));
        model.spec = std::move(sum);
    } else {
        throw std::domain_error("levy json: unknown family '" + family + "'");
    }
    model.validate();
    return model;
}

json to_json(const CarmaSpec& spec) {
    json ar = json::array(), ma = json::array();
    for (const auto& a : spec.ar) ar.push_back(matrix_to_json(a));
    for (const auto& b : spec.ma) ma.push_back(matrix_to_json(b));
    return json{{"p", spec.p}, {"q", spec.q}, {"d", spec.d}, {"m", spec.m},
                {"ar", std::move(ar)}, {"ma", std::move(ma)}};
}

CarmaSpec carma_spec_from_json(const json& j) {
    CarmaSpec spec;
    spec.p = j.at("p").get<int>();
    spec.q = j.at("q").get<int>();
    spec.d = j.at("d").get<int>();
    spec.m = j.at("m").get<int>();
    for (const auto& a : j.at("ar")) spec.ar.push_back(matrix_from_json(a));
    for (const auto& b : j.at("ma")) spec.ma.push_back(matrix_from_json(b));
    spec.validate();
    return spec;
}

json to_json(const StateSpace& ss) {
    return json{{"N", ss.n()}, {"d", ss.d()}, {"m", ss.m()},
                {"A", matrix_to_json(ss.a)}, {"B", matrix_to_json(ss.b)},
                {"C", matrix_to_json(ss.c)}, {"sigma_l", matrix_to_json(ss.sigma_l)}};
}

StateSpace state_space_from_json(const json& j) {
    StateSpace ss;
    ss.a = matrix_from_json(j.at("A"));
    ss.b = matrix_from_json(j.at("B"));
    ss.c = matrix_from_json(j.at("C"));
    ss.sigma_l = matrix_from_json(j.at("sigma_l"));
    ss.validate();
    return ss;
}

json to_json(const FitResult& fit) {
    json out{{"theta_hat", vector_to_json(fit.theta_hat)},
             {"loglik", fit.loglik},
             {"converged", fit.converged},
             {"iterations", fit.iterations},
             {"gradient_norm", fit.gradient_norm}};
    if (fit.omega.size() > 0) {
        out["omega"] = matrix_to_json(fit.omega);
        out["stderr"] = vector_to_json(fit.std_err);
        out["omega_clipped"] = fit.omega_clipped;
    }
    return out;
}

json to_json(const IncrementDiagnostics& diag) {
    return json{{"mean_rate", diag.mean_rate},
                {"var_rate", diag.var_rate},
                {"skewness", diag.skewness},
                {"excess_kurtosis", diag.excess_kurtosis},
                {"bin_edges", diag.bin_edges},
                {"bin_counts", diag.bin_counts}};
}

Parametrization parametrization_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    const auto& box_json = j.at("box");
    optim::Box box;
    box.lo.resize(static_cast<Eigen::Index>(box_json.size()));
    box.hi.resize(static_cast<Eigen::Index>(box_json.size()));
    for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
        const auto& pair = box_json.at(static_cast<size_t>(i));
        box.lo(i) = pair.at(0).get<double>();
        box.hi(i) = pair.at(1).get<double>();
        if (!(box.lo(i) <= box.hi(i))) throw std::domain_error("parametrization: empty box interval");
    }

    if (family == "univariate-canonical" || family == "ou") {
        const int p = family == "ou" ? 1 : j.at("p").get<int>();
        const int q = family == "ou" ? 0 : j.at("q").get<int>();
        return Parametrization::univariate(p, q, box);
    }
    if (family == "bivariate-paper") return Parametrization::bivariate_paper(box);
    if (family == "user-table") {
        std::vector<Parametrization::Assignment> assign;
        for (const auto& a : j.at("assignments")) {
            Parametrization::Assignment as;
            const std::string target = a.at("target").get<std::string>();
            if (target.size() != 1) throw std::domain_error("parametrization: bad target");
            as.target = target[0];
            as.row = a.at("row").get<int>();
            as.col = a.at("col").get<int>();
            as.theta_index = a.at("theta_index").get<int>();
            if (a.contains("scale")) as.scale = a.at("scale").get<double>();
            assign.push_back(as);
        }
        return Parametrization::user_table(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                                           matrix_from_json(j.at("C")),
                                           matrix_from_json(j.at("sigma_factor")), std::move(assign),
                                           box);
    }
    throw std::domain_error("parametrization: unknown family '" + family + "'");
}

}  // namespace carma::io
