#pragma once

#include <Eigen/Dense>

#include "esgport/nig.hpp"
#include "esgport/scenario_engine.hpp"
#include "json.hpp"

namespace esgport {

inline nlohmann::json to_json_vector(const Eigen::VectorXd& v) {
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline nlohmann::json to_json_matrix(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_vector(m.row(i).transpose()));
    return rows;
}

inline void to_json(nlohmann::json& j, const ArmaGarchFit& f) {
    j = {{"p", f.p},
         {"q", f.q},
         {"phi", f.phi},
         {"theta", f.theta},
         {"mu", f.mu},
         {"garch_active", f.garch_active},
         {"omega", f.omega},
         {"a1", f.a1},
         {"b1", f.b1},
         {"residual_variance", f.residual_variance},
         {"loglik", f.loglik},
         {"bic", f.bic},
         {"garch_converged", f.garch_converged},
         {"ljung_box_stat", f.ljung_box_stat},
         {"ljung_box_pvalue", f.ljung_box_pvalue},
         {"recent_returns", f.recent_returns},
         {"recent_residuals", f.recent_residuals},
         {"last_variance", f.last_variance}};
    auto diag = nlohmann::json::array();
    for (const auto& d : f.diagnostics)
        diag.push_back({{"p", d.p}, {"q", d.q}, {"loglik", d.loglik}, {"bic", d.bic}, {"converged", d.converged},
                        {"message", d.message}});
    j["diagnostics"] = diag;
}

inline void from_json(const nlohmann::json& j, ArmaGarchFit& f) {
    j.at("p").get_to(f.p);
    j.at("q").get_to(f.q);
    j.at("phi").get_to(f.phi);
    j.at("theta").get_to(f.theta);
    j.at("mu").get_to(f.mu);
    j.at("garch_active").get_to(f.garch_active);
    j.at("omega").get_to(f.omega);
    j.at("a1").get_to(f.a1);
    j.at("b1").get_to(f.b1);
    j.at("residual_variance").get_to(f.residual_variance);
    j.at("loglik").get_to(f.loglik);
    j.at("bic").get_to(f.bic);
    j.at("garch_converged").get_to(f.garch_converged);
    j.at("ljung_box_stat").get_to(f.ljung_box_stat);
    j.at("ljung_box_pvalue").get_to(f.ljung_box_pvalue);
    j.at("recent_returns").get_to(f.recent_returns);
    j.at("recent_residuals").get_to(f.recent_residuals);
    j.at("last_variance").get_to(f.last_variance);
    f.diagnostics.clear();
    if (j.contains("diagnostics"))
        for (const auto& d : j["diagnostics"])
            f.diagnostics.push_back({d.at("p").get<int>(), d.at("q").get<int>(), d.at("loglik").get<double>(),
                                     d.at("bic").get<double>(), d.at("converged").get<bool>(),
                                     d.at("message").get<std::string>()});
}

inline void to_json(nlohmann::json& j, const NigParams& p) {
    j = {{"alpha_bar", p.alpha_bar},
         {"location", to_json_vector(p.location)},
         {"skewness", to_json_vector(p.skewness)},
         {"scale", to_json_matrix(p.scale)}};
}

inline void from_json(const nlohmann::json& j, NigParams& p) {
    j.at("alpha_bar").get_to(p.alpha_bar);
    const auto loc = j.at("location").get<std::vector<double>>();
    const auto skew = j.at("skewness").get<std::vector<double>>();
    const auto scale = j.at("scale").get<std::vector<std::vector<double>>>();
    const auto d = static_cast<Eigen::Index>(loc.size());
    p.location = Eigen::Map<const Eigen::VectorXd>(loc.data(), d);
    p.skewness = Eigen::Map<const Eigen::VectorXd>(skew.data(), static_cast<Eigen::Index>(skew.size()));
    p.scale.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            p.scale(i, k) = scale.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k));
    p.validate();
}

}  // namespace esgport
