#include "race/codebook.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace race {
namespace {

std::size_t checked_product(const std::vector<std::size_t>& k) {
  std::size_t product = 1;
  for (std::size_t factor : k) {
    if (factor < 2) throw std::invalid_argument("StagePlan: every branching factor must be >= 2");
    product *= factor;
  }
  return product;
}

// Pseudo-inverse beam synthesis with the Gram matrix factorized once.
class BeamSynthesizer {
 public:
  explicit BeamSynthesizer(const AngleGrid& grid) : grid_(grid), gram_(grid.steering_matrix() * grid.steering_matrix().adjoint()) {
    if (gram_.rcond() < 1e-12) throw NumericFailure("design_beam: U U^H is singular");
  }

  BeamVector design(const SubRange& subrange) const {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (subrange.count == 0 || subrange.first + subrange.count > grid_.size())
      throw std::invalid_argument("design_beam: sub-range is empty or outside the grid");
    CVector z = CVector::Zero(n);
    z.segment(static_cast<Eigen::Index>(subrange.first), static_cast<Eigen::Index>(subrange.count)).setOnes();
    CVector f = gram_.solve(grid_.steering_matrix() * z);
    const double norm = f.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericFailure("design_beam: degenerate solution");
    return BeamVector{f / norm, subrange, 1.0 / norm};
  }

 private:
  const AngleGrid& grid_;
  Eigen::PartialPivLU<CMatrix> gram_;
};

}  // namespace

StagePlan::StagePlan(std::vector<std::size_t> k_vector, std::size_t n_antennas)
    : k_(std::move(k_vector)), n_(n_antennas) {
  if (k_.empty()) throw std::invalid_argument("StagePlan: k_vector must not be empty");
  const std::size_t product = checked_product(k_);
  if (product != n_)
    throw std::invalid_argument("StagePlan: product of " + to_string() + " is " +
                                std::to_string(product) + ", expected N = " + std::to_string(n_));
}

StagePlan::StagePlan(std::vector<std::size_t> k_vector)
    : StagePlan(k_vector, k_vector.empty() ? 0 : checked_product(k_vector)) {}

StagePlan StagePlan::uniform(std::size_t k, std::size_t n_antennas) {
  if (k < 2) throw std::invalid_argument("StagePlan: branching factor must be >= 2");
  std::vector<std::size_t> ks;
  std::size_t width = n_antennas;
  while (width > 1) {
    if (width % k != 0)
      throw std::invalid_argument("StagePlan: N = " + std::to_string(n_antennas) +
                                  " is not a power of K = " + std::to_string(k));
    ks.push_back(k);
    width /= k;
  }
  return StagePlan(std::move(ks), n_antennas);
}

std::size_t StagePlan::branching(std::size_t stage) const {
  if (stage == 0 || stage > k_.size())
    throw std::out_of_range("StagePlan: stage " + std::to_string(stage) + " out of range");
  return k_[stage - 1];
}

std::size_t StagePlan::subrange_width(std::size_t stage) const {
  if (stage > k_.size()) throw std::out_of_range("StagePlan: stage " + std::to_string(stage) + " out of range");
  std::size_t width = n_;
  for (std::size_t s = 0; s < stage; ++s) width /= k_[s];
  return width;
}

std::size_t StagePlan::total_measurements() const noexcept {
  return std::accumulate(k_.begin(), k_.end(), std::size_t{0},
                         [](std::size_t acc, std::size_t k) { return acc + k * k; });
}

std::string StagePlan::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < k_.size(); ++i) out << (i ? "," : "") << k_[i];
  out << ']';
  return out.str();
}

SubRange root_subrange(const StagePlan& plan) { return SubRange{0, {}, 0, plan.n_antennas()}; }

std::vector<SubRange> enumerate_subranges(const StagePlan& plan, const SubRange& parent) {
  if (parent.stage >= plan.stage_count())
    throw std::invalid_argument("enumerate_subranges: parent is already at the final stage");
  if (parent.count != plan.subrange_width(parent.stage))
    throw std::invalid_argument("enumerate_subranges: parent width does not match the plan");
  const std::size_t k = plan.branching(parent.stage + 1);
  const std::size_t width = parent.count / k;
  std::vector<SubRange> children;
  children.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    SubRange child{parent.stage + 1, parent.branch_path, parent.first + i * width, width};
    child.branch_path.push_back(i);
    children.push_back(std::move(child));
  }
  return children;
}

BeamVector design_beam(const SubRange& subrange, const AngleGrid& grid) {
  return BeamSynthesizer(grid).design(subrange);
}

Codebook::Codebook(StagePlan plan, AngleGrid grid) : plan_(std::move(plan)), grid_(std::move(grid)) {
  if (plan_.n_antennas() != grid_.size())
    throw std::invalid_argument("Codebook: plan N does not match the grid size");
  const BeamSynthesizer synth(grid_);
  std::vector<SubRange> frontier{root_subrange(plan_)};
  for (std::size_t s = 1; s <= plan_.stage_count(); ++s) {
    std::vector<SubRange> next;
    std::vector<BeamVector> beams;
    for (const SubRange& parent : frontier)
      for (SubRange& child : enumerate_subranges(plan_, parent)) {
        beams.push_back(synth.design(child));
        next.push_back(std::move(child));
      }
    const double c = beams.front().gain_constant;
    for (const BeamVector& b : beams)
      if (std::abs(b.gain_constant - c) > 1e-9 * c)
        throw NumericFailure("Codebook: unequal gain constants within stage " + std::to_string(s));
    gain_.push_back(c);
    stages_.push_back(std::move(beams));
    frontier = std::move(next);
  }
}

std::size_t Codebook::beams_in_stage(std::size_t stage) const {
  return plan_.n_antennas() / plan_.subrange_width(stage);
}

double Codebook::gain_constant(std::size_t stage) const {
  plan_.branching(stage);  // range check
  return gain_[stage - 1];
}

const BeamVector& Codebook::beam(std::size_t stage, std::size_t block) const {
  plan_.branching(stage);
  const auto& beams = stages_[stage - 1];
  if (block >= beams.size())
    throw std::out_of_range("Codebook: block " + std::to_string(block) + " out of range");
  return beams[block];
}

const BeamVector& Codebook::child(std::size_t stage, std::size_t parent_block, std::size_t k) const {
  const std::size_t branching = plan_.branching(stage);
  if (k >= branching) throw std::out_of_range("Codebook: child index out of range");
  return beam(stage, parent_block * branching + k);
}

const BeamVector& Codebook::lookup(std::span<const std::size_t> branch_path) const {
  if (branch_path.empty() || branch_path.size() > plan_.stage_count())
    throw std::out_of_range("Codebook: branch path length out of range");
  std::size_t block = 0;
  for (std::size_t s = 0; s < branch_path.size(); ++s) {
    if (branch_path[s] >= plan_.k_vector()[s]) throw std::out_of_range("Codebook: branch index out of range");
    block = block * plan_.k_vector()[s] + branch_path[s];
  }
  return beam(branch_path.size(), block);
}

Codebook build_codebook(const StagePlan& plan, const AngleGrid& grid) { return Codebook(plan, grid); }

void write_beam_patterns_csv(const Codebook& codebook, std::ostream& out) {
  const AngleGrid& grid = codebook.grid();
  out << "stage,beam,grid_index,magnitude\n";
  for (std::size_t s = 1; s <= codebook.stage_count(); ++s)
    for (std::size_t b = 0; b < codebook.beams_in_stage(s); ++b) {
      const CVector response = grid.steering_matrix().adjoint() * codebook.beam(s, b).coefficients;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", std::abs(response[static_cast<Eigen::Index>(i)]));
        out << s << ',' << b << ',' << i << ',' << buf << '\n';
      }
    }
}

}  // namespace race
