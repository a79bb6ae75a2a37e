#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "srl/grading.hpp"
#include "srl/vector_field.hpp"

namespace srl {

/// Generator word (Y_1, ..., Y_j) as zero-based generator indices; the
/// operator applies Y_j first.
using Word = std::vector<std::size_t>;

std::string word_label(const Word& w);

/// All words of length 1..max_length with their images D g, ordered by
/// length and then lexicographically.
std::vector<std::pair<Word, Polynomial>> operator_images(std::span<const PolyVectorField> generators,
                                                         const Polynomial& g, std::size_t max_length);

/// Exact value (D theta^k)(x) for a word D of length n with k > d_n.
struct CertificateEntry {
    std::size_t n = 0;
    std::size_t k = 0;  // zero-based coordinate
    Word word;
    Rational value;
};

/// Condition (i) at level n: J theta(x) maps C_n(x) onto span{e_1..e_{d_n}}.
struct AlignmentWitness {
    std::size_t n = 0;
    std::size_t rank = 0;
    std::size_t flag_dim = 0;
};

class AdaptedChart {
public:
    AdaptedChart(PolyMap theta, GradedStructure structure, std::vector<AlignmentWitness> alignment,
                 std::vector<CertificateEntry> certificate)
        : theta_(std::move(theta)), structure_(std::move(structure)), alignment_(std::move(alignment)),
          certificate_(std::move(certificate)) {}

    const PolyMap& theta() const { return theta_; }
    const GradedStructure& structure() const { return structure_; }
    const std::vector<AlignmentWitness>& alignment() const { return alignment_; }
    const std::vector<CertificateEntry>& certificate() const { return certificate_; }

private:
    PolyMap theta_;
    GradedStructure structure_;
    std::vector<AlignmentWitness> alignment_;
    std::vector<CertificateEntry> certificate_;
};

struct ChartViolation {
    enum class Condition { alignment, vanishing };
    Condition condition = Condition::vanishing;
    std::size_t n = 0;
    std::size_t k = 0;  // zero-based coordinate; unused for alignment
    Word word;
    Rational value;
    std::string message;
};

using ChartValidation = std::variant<AdaptedChart, ChartViolation>;

/// Verifies conditions (i) and (ii) exactly. Throws InvalidArgument if theta
/// lacks an exact polynomial inverse or theta(x) != 0.
ChartValidation validate_adapted(const PolyMap& theta, std::span<const PolyVectorField> generators,
                                 const GradedStructure& structure);

/// Builds an adapted chart: translate the base point to 0, align a greedy
/// bracket basis with the leading coordinates, then add to each coordinate of
/// weight w a polynomial correction in lower-weight coordinates (weighted
/// degree 2..w-1, total degree <= max_correction_degree) solving the exact
/// vanishing conditions. max_correction_degree = 0 selects the step N.
AdaptedChart construct_adapted(std::span<const PolyVectorField> generators, const GradingResult& grading,
                               unsigned max_correction_degree = 0);

/// `n,k,word,value` rows (k one-based).
std::string certificate_csv(const AdaptedChart& chart);

}  // namespace srl
