#include "minar/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace minar {

using nlohmann::json;

json model_to_json(const MinarModel& model) {
    const int n = model.dim();
    json j;
    j["n"] = n;
    j["A"] = model.thinning().matrix().data(); // row-major
    json innov;
    const InnovationModel& im = model.innovations();
    if (im.mode() == InnovationModel::Mode::constant) {
        innov["mode"] = "constant";
        innov["lambda"] = im.lambda();
    } else {
        innov["mode"] = "regression";
        innov["beta"] = im.beta();
        innov["covariates"] = im.covariate_names();
    }
    j["innovations"] = std::move(innov);
    return j;
}

MinarModel model_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    const auto a_flat = j.at("A").get<std::vector<double>>();
    if (static_cast<int>(a_flat.size()) != n * n)
        throw std::runtime_error("model JSON: A must hold n*n entries row-major");
    Matrix a(n, n);
    a.data() = a_flat;
    const json& innov = j.at("innovations");
    const std::string mode = innov.at("mode").get<std::string>();
    InnovationModel im;
    if (mode == "constant") {
        im = InnovationModel::constant(innov.at("lambda").get<Vec>());
    } else if (mode == "regression") {
        im = InnovationModel::regression(innov.at("beta").get<std::vector<Vec>>(),
                                         innov.at("covariates").get<std::vector<std::string>>());
    } else {
        throw std::runtime_error("model JSON: unknown innovation mode '" + mode + "'");
    }
    if (im.dim() != n) throw std::runtime_error("model JSON: innovation dimension != n");
    return MinarModel(ThinningMatrix(std::move(a)), std::move(im));
}

static std::string structure_name(AStructure s) {
    switch (s) {
    case AStructure::full: return "full";
    case AStructure::diagonal: return "diagonal";
    case AStructure::zero: return "zero";
    }
    return "full";
}

static AStructure structure_from_name(const std::string& s) {
    if (s == "full") return AStructure::full;
    if (s == "diagonal") return AStructure::diagonal;
    if (s == "zero") return AStructure::zero;
    throw std::runtime_error("layout JSON: unknown structure '" + s + "'");
}

json layout_to_json(const ParameterLayout& layout) {
    json j;
    j["n"] = layout.n;
    j["structure"] = structure_name(layout.structure);
    j["mode"] = layout.mode == InnovationModel::Mode::constant ? "constant" : "regression";
    j["covariates"] = layout.covariate_names;
    j["count"] = layout.total();
    return j;
}

ParameterLayout layout_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    const AStructure s = structure_from_name(j.at("structure").get<std::string>());
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "constant") return ParameterLayout::constant(n, s);
    if (mode == "regression")
        return ParameterLayout::regression(n, s,
                                           j.at("covariates").get<std::vector<std::string>>());
    throw std::runtime_error("layout JSON: unknown mode '" + mode + "'");
}

json fitted_to_json(const FittedModel& fit) {
    json j;
    j["theta"] = fit.theta;
    json se = json::array();
    for (double v : fit.se) {
        if (std::isfinite(v)) se.push_back(v);
        else se.push_back(nullptr);
    }
    j["se"] = std::move(se);
    j["se_available"] = fit.se_available;
    j["loglik"] = fit.loglik;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["grad_maxnorm"] = fit.grad_maxnorm;
    j["spectral_radius"] = fit.spectral_radius;
    j["stationary"] = fit.stationary;
    j["layout"] = layout_to_json(fit.layout);
    // The fitted model in the standard model document shape, usable directly
    // by `simulate` and `monitor`. Omitted when the fit is non-stationary
    // (the document would not round-trip through validation).
    if (fit.stationary) {
        json model;
        model["n"] = fit.layout.n;
        model["A"] = fit.alpha.data();
        json innov;
        if (fit.innovations.mode() == InnovationModel::Mode::constant) {
            innov["mode"] = "constant";
            innov["lambda"] = fit.innovations.lambda();
        } else {
            innov["mode"] = "regression";
            innov["beta"] = fit.innovations.beta();
            innov["covariates"] = fit.innovations.covariate_names();
        }
        model["innovations"] = std::move(innov);
        j["model"] = std::move(model);
    }
    return j;
}

FittedModel fitted_from_json(const json& j) {
    FittedModel fit;
    fit.layout = layout_from_json(j.at("layout"));
    fit.theta = j.at("theta").get<Vec>();
    fit.se.clear();
    for (const auto& v : j.at("se")) {
        fit.se.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : v.get<double>());
    }
    fit.se_available = j.at("se_available").get<bool>();
    fit.loglik = j.at("loglik").get<double>();
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<int>();
    fit.grad_maxnorm = j.value("grad_maxnorm", 0.0);
    fit.spectral_radius = j.at("spectral_radius").get<double>();
    fit.stationary = j.at("stationary").get<bool>();
    UnpackedParams p = unpack(fit.theta, fit.layout);
    fit.alpha = std::move(p.alpha);
    fit.innovations = std::move(p.innovations);
    return fit;
}

json grid_spec_to_json(const GridSpec& spec) {
    json j;
    j["model"] = model_to_json(spec.model);
    j["total_length"] = spec.total_length;
    j["setup_length"] = spec.setup_length;
    j["outbreak_time"] = spec.outbreak_time;
    j["kappas"] = spec.kappas;
    j["alphas"] = spec.alphas;
    json approaches = json::array();
    for (const auto a : spec.approaches) approaches.push_back(to_string(a));
    j["approaches"] = std::move(approaches);
    j["rule_fraction"] = spec.rule_fraction;
    j["replicates"] = spec.replicates;
    j["base_seed"] = spec.base_seed;
    j["burn_in"] = spec.burn_in;
    return j;
}

GridSpec grid_spec_from_json(const json& j) {
    GridSpec spec(model_from_json(j.at("model")));
    spec.total_length = j.value("total_length", 200);
    spec.setup_length = j.value("setup_length", 150);
    spec.outbreak_time = j.value("outbreak_time", 170);
    if (j.contains("kappas")) spec.kappas = j.at("kappas").get<Vec>();
    if (j.contains("alphas")) spec.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("approaches")) {
        spec.approaches.clear();
        for (const auto& a : j.at("approaches")) {
            const std::string name = a.get<std::string>();
            if (name == "trivariate") spec.approaches.push_back(FitApproach::trivariate);
            else if (name == "independent") spec.approaches.push_back(FitApproach::independent);
            else throw std::runtime_error("experiment JSON: unknown approach '" + name + "'");
        }
    }
    spec.rule_fraction = j.value("rule_fraction", 0.6);
    spec.replicates = j.value("replicates", 1000);
    spec.base_seed = j.value("base_seed", static_cast<std::uint64_t>(1));
    spec.burn_in = j.value("burn_in", 100);
    return spec;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("JSON parse error in '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << contents;
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace minar
