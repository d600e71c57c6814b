#pragma once

#include <vector>

#include "hauto/syntax.hpp"

namespace hauto {

// Definite relations of a reduced heap, indexed densely (see dense()).
class DefiniteInfo {
public:
    bool inconsistent = false;

    std::size_t size() const { return cls_.size(); }
    std::size_t cls(std::size_t i) const { return cls_[i]; }
    bool eq(std::size_t a, std::size_t b) const { return inconsistent || cls_[a] == cls_[b]; }
    bool neq(std::size_t a, std::size_t b) const { return inconsistent || neq_[cls_[a] * n_ + cls_[b]]; }
    bool decided(std::size_t a, std::size_t b) const { return eq(a, b) || neq(a, b); }
    bool allocated(std::size_t a) const { return inconsistent || alloc_[cls_[a]]; }
    bool points(std::size_t a, std::size_t b) const { return inconsistent || pts_[cls_[a] * n_ + cls_[b]]; }
    bool reaches(std::size_t a, std::size_t b) const { return inconsistent || reach_[cls_[a] * n_ + cls_[b]]; }

    // closure as atoms over the heap's variables
    std::vector<PureAtom> closure(const SymbolicHeap& h) const;

    friend DefiniteInfo complete(const SymbolicHeap& tau);

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> cls_;
    std::vector<char> neq_, alloc_, pts_, reach_;
};

DefiniteInfo complete(const SymbolicHeap& tau);

bool definitely_reaches(const SymbolicHeap& tau, Var x, Var y);

}  // namespace hauto
