#include "hocd/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace hocd {

void write_dataset_csv(const PairedSample& sample, const std::filesystem::path& path) {
    if (sample.x.size() != sample.y.size())
        throw EmptySample("paired sample columns differ in length");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "X,Y\n";
    char buf[128];
    for (Index t = 0; t < sample.n(); ++t) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", sample.x[t], sample.y[t]);
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

PairedSample read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty file");
    if (line == "X,Y\r") line.pop_back();
    if (line != "X,Y")
        throw ParseError(path.string() + ":1: expected header 'X,Y', got '" + line + "'");

    std::vector<double> xs, ys;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected two comma-separated values");
        std::size_t used_x = 0, used_y = 0;
        double x, y;
        try {
            x = std::stod(line.substr(0, comma), &used_x);
            y = std::stod(line.substr(comma + 1), &used_y);
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": malformed number");
        }
        if (used_x != comma || used_y != line.size() - comma - 1)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": trailing characters after number");
        if (!std::isfinite(x) || !std::isfinite(y))
            throw NonFiniteInput(path.string() + ":" + std::to_string(line_no) +
                                 ": non-finite value");
        xs.push_back(x);
        ys.push_back(y);
    }

    PairedSample sample;
    sample.x = Eigen::Map<const Eigen::ArrayXd>(xs.data(), static_cast<Index>(xs.size()));
    sample.y = Eigen::Map<const Eigen::ArrayXd>(ys.data(), static_cast<Index>(ys.size()));
    return sample;
}

} // namespace hocd
