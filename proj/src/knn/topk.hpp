#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "xld/knn.hpp"

namespace xld::detail {

struct Candidate {
  double distance;
  std::size_t index;
};

/// Strict (distance, key) order over rows of a point set.
class CandidateOrder {
 public:
  explicit CandidateOrder(const PointSet& points) : points_(&points) {}
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.index == b.index) return false;
    return points_->meta(a.index).key < points_->meta(b.index).key;
  }

 private:
  const PointSet* points_;
};

/// Keeps the k smallest candidates under CandidateOrder.
class TopK {
 public:
  TopK(std::size_t k, const PointSet& points) : k_(k), less_(points) { heap_.reserve(k + 1); }

  bool full() const { return heap_.size() >= k_; }
  std::size_t size() const { return heap_.size(); }

  void push(Candidate c) {
    if (k_ == 0) return;
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), less_);
    } else if (less_(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), less_);
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), less_);
    }
  }

  /// Largest retained distance, or +inf while not full.
  double bound() const;

  std::vector<Candidate> take_sorted() {
    std::sort_heap(heap_.begin(), heap_.end(), less_);
    return std::move(heap_);
  }

 private:
  std::size_t k_;
  CandidateOrder less_;
  std::vector<Candidate> heap_;
};

inline double TopK::bound() const {
  return full() ? heap_.front().distance : std::numeric_limits<double>::infinity();
}

NeighborList to_neighbors(const std::vector<Candidate>& sorted, const PointSet& points);

}  // namespace xld::detail
