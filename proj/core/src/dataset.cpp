#include "topoal/dataset.hpp"

#include "topoal/errors.hpp"
#include "topoal/format.hpp"
#include "topoal/rng.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace topoal {

void Dataset::validate() const {
    if (points.rows() < 1) throw ParameterError("dataset must contain at least one point");
    if (!points.allFinite()) throw ParameterError("dataset points contain non-finite entries");
    if (!labels.empty()) {
        if (static_cast<int>(labels.size()) != n())
            throw ParameterError("label count does not match point count");
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] < 0 || labels[i] >= num_classes)
                throw ParameterError("label " + std::to_string(labels[i]) + " at index " +
                                     std::to_string(i) + " outside [0, " +
                                     std::to_string(num_classes) + ")");
        }
    }
}

Dataset make_blobs(int points_per_cluster, int clusters, double sigma, std::uint64_t seed) {
    if (clusters < 2) throw ParameterError("make_blobs requires at least two clusters");
    if (points_per_cluster < 1) throw ParameterError("points_per_cluster must be positive");
    if (sigma < 0) throw ParameterError("sigma must be nonnegative");

    const int n = points_per_cluster * clusters;
    Dataset data;
    data.points.resize(n, 2);
    data.labels.resize(static_cast<std::size_t>(n));
    data.cluster_ids.resize(static_cast<std::size_t>(n));
    data.num_classes = 2;

    Rng rng(seed);
    int row = 0;
    for (int c = 0; c < clusters; ++c) {
        const double angle = 2.0 * std::numbers::pi * c / clusters;
        const double cx = std::cos(angle);
        const double cy = std::sin(angle);
        for (int p = 0; p < points_per_cluster; ++p, ++row) {
            data.points(row, 0) = cx + sigma * rng.normal();
            data.points(row, 1) = cy + sigma * rng.normal();
            data.labels[static_cast<std::size_t>(row)] = c % 2;
            data.cluster_ids[static_cast<std::size_t>(row)] = c;
        }
    }
    return data;
}

Dataset make_box(int side, double boundary) {
    if (side < 2) throw ParameterError("make_box requires side >= 2");

    const int n = side * side;
    Dataset data;
    data.points.resize(n, 2);
    data.labels.resize(static_cast<std::size_t>(n));
    data.num_classes = 2;

    int row = 0;
    for (int i = 0; i < side; ++i) {
        const double x = static_cast<double>(i) / (side - 1);
        for (int j = 0; j < side; ++j, ++row) {
            const double y = static_cast<double>(j) / (side - 1);
            data.points(row, 0) = x;
            data.points(row, 1) = y;
            data.labels[static_cast<std::size_t>(row)] = x < boundary ? 0 : 1;
        }
    }
    return data;
}

std::vector<int> modulo_relabel(const std::vector<int>& labels, int m) {
    if (m < 2) throw ParameterError("modulo_relabel requires m >= 2");
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] % m;
    return out;
}

void modulo_relabel(Dataset& data, int m) {
    data.labels = modulo_relabel(data.labels, m);
    data.num_classes = m;
}

namespace {

struct HeaderInfo {
    long long n = 0;
    long long d = 0;
    std::streampos data_start;
};

HeaderInfo read_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "missing header line");
    std::istringstream hs(line);
    HeaderInfo h;
    if (!(hs >> h.n >> h.d)) throw ParseError(path, 1, "header must be 'n d'");
    std::string extra;
    if (hs >> extra) throw ParseError(path, 1, "header must contain exactly two integers");
    if (h.n < 1 || h.d < 1) throw ParseError(path, 1, "header dimensions must be positive");
    h.data_start = in.tellg();
    return h;
}

} // namespace

Eigen::MatrixXd load_points(const std::string& path, PointsFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open points file: " + path);
    const HeaderInfo h = read_header(in, path);

    Eigen::MatrixXd points(h.n, h.d);
    if (format == PointsFormat::text) {
        std::string line;
        for (long long i = 0; i < h.n; ++i) {
            if (!std::getline(in, line))
                throw ParseError(path, 2 + i, "expected " + std::to_string(h.n) + " data rows");
            std::istringstream row(line);
            std::string token;
            for (long long j = 0; j < h.d; ++j) {
                if (!(row >> token))
                    throw ParseError(path, 2 + i,
                                     "expected " + std::to_string(h.d) + " values per row");
                double v = 0;
                if (!parse_double(token, v))
                    throw ParseError(path, 2 + i, "invalid float '" + token + "'");
                if (!std::isfinite(v)) throw ParseError(path, 2 + i, "non-finite value");
                points(i, j) = v;
            }
            std::string trailing;
            if (row >> trailing) throw ParseError(path, 2 + i, "extra values on row");
        }
    } else {
        std::vector<float> buffer(static_cast<std::size_t>(h.n * h.d));
        in.read(reinterpret_cast<char*>(buffer.data()),
                static_cast<std::streamsize>(buffer.size() * sizeof(float)));
        if (in.gcount() != static_cast<std::streamsize>(buffer.size() * sizeof(float)))
            throw ParseError(path, 2, "binary payload shorter than n*d float32 values");
        std::size_t idx = 0;
        for (long long i = 0; i < h.n; ++i)
            for (long long j = 0; j < h.d; ++j, ++idx) {
                const double v = static_cast<double>(buffer[idx]);
                if (!std::isfinite(v)) throw ParseError(path, 2, "non-finite value in payload");
                points(i, j) = v;
            }
    }
    return points;
}

std::vector<int> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file: " + path);
    std::vector<int> labels;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        long long v = 0;
        if (!parse_int(line, v)) throw ParseError(path, lineno, "invalid label '" + line + "'");
        if (v < 0) throw ParseError(path, lineno, "labels must be nonnegative");
        labels.push_back(static_cast<int>(v));
    }
    if (labels.empty()) throw ParseError(path, lineno, "labels file is empty");
    return labels;
}

Dataset load_embeddings(const std::string& points_path, const std::string& labels_path,
                        int expected_classes, PointsFormat format) {
    Dataset data;
    data.points = load_points(points_path, format);
    data.labels = load_labels(labels_path);
    if (static_cast<int>(data.labels.size()) != data.n())
        throw ParseError(labels_path, static_cast<long>(data.labels.size()),
                         "label count " + std::to_string(data.labels.size()) +
                             " does not match point count " + std::to_string(data.n()));
    int max_label = 0;
    for (int v : data.labels) max_label = std::max(max_label, v);
    data.num_classes = expected_classes > 0 ? expected_classes : max_label + 1;
    data.validate();
    return data;
}

void save_points(const Eigen::MatrixXd& points, const std::string& path, PointsFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write points file: " + path);
    out << points.rows() << ' ' << points.cols() << '\n';
    if (format == PointsFormat::text) {
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            for (Eigen::Index j = 0; j < points.cols(); ++j) {
                if (j) out << ' ';
                out << format_double(points(i, j));
            }
            out << '\n';
        }
    } else {
        std::vector<float> buffer(static_cast<std::size_t>(points.rows() * points.cols()));
        std::size_t idx = 0;
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            for (Eigen::Index j = 0; j < points.cols(); ++j, ++idx)
                buffer[idx] = static_cast<float>(points(i, j));
        out.write(reinterpret_cast<const char*>(buffer.data()),
                  static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    }
    if (!out) throw IoError("failed writing points file: " + path);
}

void save_labels(const std::vector<int>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write labels file: " + path);
    for (int v : labels) out << v << '\n';
    if (!out) throw IoError("failed writing labels file: " + path);
}

int Oracle::query(int node) {
    if (node < 0 || node >= size())
        throw ParameterError("oracle query for invalid node " + std::to_string(node));
    ++queries_;
    return truth_[static_cast<std::size_t>(node)];
}

} // namespace topoal
