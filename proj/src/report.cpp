#include "wavecone/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavecone/errors.hpp"

namespace wavecone {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw error("short write to '" + path + "'");
}

std::string experiment_csv(const ExperimentReport& rep) {
    std::ostringstream os;
    os << "scale,lp_norm,tv_mu,tv_sigma,ratio,cone_max_dist,M_inf\n";
    for (const auto& r : rep.rows) {
        os << format_double(r.scale) << "," << format_double(r.lp_norm) << ","
           << format_double(r.tv_mu) << "," << format_double(r.tv_sigma) << ","
           << format_double(r.ratio) << "," << format_double(r.cone_max_dist) << ","
           << format_double(r.M_inf) << "\n";
    }
    return os.str();
}

std::string experiment_json(const ExperimentReport& rep) {
    nlohmann::ordered_json j;
    j["label"] = rep.label;
    j["seed"] = rep.seed;
    j["grid_n"] = rep.grid_n;
    j["operator_hash"] = rep.operator_hash;
    j["a_free_extended_range"] = rep.a_free_extended_range;
    j["exploratory"] = rep.exploratory;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json row;
        row["scale"] = format_double(r.scale);
        row["lp_norm"] = format_double(r.lp_norm);
        row["tv_mu"] = format_double(r.tv_mu);
        row["tv_sigma"] = format_double(r.tv_sigma);
        row["ratio"] = format_double(r.ratio);
        row["cone_max_dist"] = format_double(r.cone_max_dist);
        row["M_inf"] = format_double(r.M_inf);
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

} // namespace wavecone
