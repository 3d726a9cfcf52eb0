#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace topoal {

// Feature vectors with optional ground-truth labels. `cluster_ids` is
// generator metadata (which blob produced each point) used by coverage
// diagnostics; it is empty for datasets that have no cluster structure.
struct Dataset {
    Eigen::MatrixXd points;        // n x d, one row per sample
    std::vector<int> labels;       // empty when unlabeled
    int num_classes = 0;           // K; 0 when unlabeled
    std::vector<int> cluster_ids;  // empty when not applicable

    int n() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    bool has_labels() const { return !labels.empty(); }

    // Checks finiteness of points and label ranges; throws ParameterError.
    void validate() const;
};

// Isotropic Gaussian clusters centered at even spacings around the unit
// circle (counterclockwise from angle 0), with alternating binary classes.
// The seed controls only the Gaussian noise.
Dataset make_blobs(int points_per_cluster = 300, int clusters = 8, double sigma = 0.17,
                   std::uint64_t seed = 0);

// side x side lattice on the unit square; class 0 left of x = boundary.
Dataset make_box(int side = 65, double boundary = 0.3);

// Remaps labels to their values modulo m and sets K = m.
std::vector<int> modulo_relabel(const std::vector<int>& labels, int m);
void modulo_relabel(Dataset& data, int m);

enum class PointsFormat { text, binary };

// Points file: header line "n d", then n rows of d decimal floats (text) or
// n*d little-endian float32 values (binary). Labels file: n lines, one
// base-10 integer each. Parse errors carry the file and line.
Dataset load_embeddings(const std::string& points_path, const std::string& labels_path,
                        int expected_classes = 0, PointsFormat format = PointsFormat::text);

Eigen::MatrixXd load_points(const std::string& path, PointsFormat format = PointsFormat::text);
std::vector<int> load_labels(const std::string& path);
void save_points(const Eigen::MatrixXd& points, const std::string& path,
                 PointsFormat format = PointsFormat::text);
void save_labels(const std::vector<int>& labels, const std::string& path);

// Hands out ground-truth labels one query at a time and counts the queries,
// mimicking a human annotator. Accuracy evaluation reads `truth()` directly
// and does not count as querying.
class Oracle {
public:
    explicit Oracle(std::vector<int> truth) : truth_(std::move(truth)) {}

    int query(int node);
    std::size_t queries() const { return queries_; }
    const std::vector<int>& truth() const { return truth_; }
    int size() const { return static_cast<int>(truth_.size()); }

private:
    std::vector<int> truth_;
    std::size_t queries_ = 0;
};

} // namespace topoal
