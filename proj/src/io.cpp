#include "ptc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ptc {

std::string format_double(double value) {
    char buffer[40];
    // %.17g always round-trips; prefer the shorter %.15g / %.16g when exact.
    for (int precision : {15, 16, 17}) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
        double parsed = 0.0;
        std::sscanf(buffer, "%lf", &parsed);
        if (parsed == value)
            break;
    }
    return buffer;
}

std::string trajectory_csv(const Trajectory& trajectory, double rescale_factor) {
    const TimeSeries* na = trajectory.series("Na");
    const TimeSeries* purity = trajectory.series("purity");
    if (!na || !purity)
        throw std::runtime_error("trajectory_csv: missing Na/purity series");

    std::vector<const TimeSeries*> populations;
    for (const auto& ts : trajectory.observables)
        if (ts.name.size() > 1 && ts.name[0] == 'p' && std::isdigit(ts.name[1]))
            populations.push_back(&ts);

    std::ostringstream out;
    out << "t_ms,Na,rescaled_Na,purity";
    for (const auto* ts : populations)
        out << ',' << ts->name;
    out << '\n';
    for (size_t i = 0; i < trajectory.times.size(); ++i) {
        out << format_double(trajectory.times[i]) << ',' << format_double(na->values[i])
            << ',' << format_double(rescale_factor * na->values[i]) << ','
            << format_double(purity->values[i]);
        for (const auto* ts : populations)
            out << ',' << format_double(ts->values[i]);
        out << '\n';
    }
    return out.str();
}

std::string classical_csv(const ClassicalTrajectory& trajectory) {
    std::ostringstream out;
    out << "t_ms,re_alpha,im_alpha,abs2_alpha\n";
    for (size_t i = 0; i < trajectory.times.size(); ++i) {
        const auto alpha = trajectory.alphas[i];
        out << format_double(trajectory.times[i]) << ',' << format_double(alpha.real()) << ','
            << format_double(alpha.imag()) << ',' << format_double(std::norm(alpha)) << '\n';
    }
    return out.str();
}

std::string husimi_csv(const HusimiGrid& grid) {
    std::ostringstream out;
    const int res = grid.spec.resolution;
    for (int iq = 0; iq < res; ++iq) {
        for (int ip = 0; ip < res; ++ip) {
            if (ip)
                out << ',';
            out << format_double(grid.values(iq, ip));
        }
        out << '\n';
    }
    return out.str();
}

std::string husimi_long_csv(const HusimiGrid& grid) {
    std::ostringstream out;
    out << "q,p,Q\n";
    const int res = grid.spec.resolution;
    for (int iq = 0; iq < res; ++iq)
        for (int ip = 0; ip < res; ++ip)
            out << format_double(grid.q_at(iq)) << ',' << format_double(grid.p_at(ip)) << ','
                << format_double(grid.values(iq, ip)) << '\n';
    return out.str();
}

nlohmann::ordered_json husimi_axes_json(const HusimiGrid& grid) {
    nlohmann::ordered_json axes;
    axes["q_min"] = grid.spec.q_min;
    axes["q_max"] = grid.spec.q_max;
    axes["p_min"] = grid.spec.p_min;
    axes["p_max"] = grid.spec.p_max;
    axes["resolution"] = grid.spec.resolution;
    axes["cell_dq"] = grid.cell_dq();
    axes["cell_dp"] = grid.cell_dp();
    axes["riemann_mass"] = grid.riemann_mass();
    return axes;
}

nlohmann::ordered_json validation_report_json(const ValidationReport& report) {
    nlohmann::ordered_json out;
    out["threshold"] = report.threshold;
    out["pass"] = report.pass;
    out["links"] = nlohmann::ordered_json::array();
    for (const auto& link : report.links) {
        nlohmann::ordered_json entry;
        entry["name"] = link.name;
        entry["lhs"] = link.lhs;
        entry["rhs"] = link.rhs;
        entry["ratio"] = link.ratio;
        entry["pass"] = link.pass;
        out["links"].push_back(entry);
    }
    return out;
}

nlohmann::ordered_json operator_json(const Operator& op, double zero_tol) {
    nlohmann::ordered_json out;
    out["dim"] = static_cast<int>(op.rows());
    auto entries = nlohmann::ordered_json::array();
    for (Eigen::Index row = 0; row < op.rows(); ++row)
        for (Eigen::Index col = 0; col < op.cols(); ++col) {
            const Cplx v = op(row, col);
            if (std::abs(v) > zero_tol)
                entries.push_back({row, col, v.real(), v.imag()});
        }
    out["entries"] = std::move(entries);
    return out;
}

nlohmann::ordered_json effective_model_json(const EffectiveModel& model) {
    nlohmann::ordered_json out;
    out["h_eff"] = operator_json(model.h_eff);
    out["jumps_eff"] = nlohmann::ordered_json::array();
    for (const auto& jump : model.jumps_eff)
        out["jumps_eff"].push_back(operator_json(jump));
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_text_file: cannot open " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write_text_file: write failed for " + path.string());
}

} // namespace ptc
