#include "pwcv/builder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace pwcv {

namespace {

double checked_eval(const Integrand& g, const Point& u) {
    const double v = g(u);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite integrand value at (";
        for (std::size_t d = 0; d < u.size(); ++d) msg << (d ? ", " : "") << u[d];
        msg << ")";
        throw std::runtime_error(msg.str());
    }
    return v;
}

static_assert(std::endian::native == std::endian::little,
              "CV cache format assumes a little-endian host");

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("CV cache: truncated stream");
    return v;
}

constexpr std::uint64_t kCacheMagic = 0x3130564357505743ull;  // "CWPWCV01" LE

}  // namespace

void region_error(Region& region, double epsilon) {
    const std::size_t D = region.box.dim();
    const NestedIntegrals n = nested_integrals(region.grid, region.box);
    region.err_per_dim.assign(D, 0.0);
    region.err_max = 0.0;
    region.split_dim = 0;
    for (std::size_t d = 0; d < D; ++d) {
        const double e = std::abs(n.high - n.low_per_dim[d]) + region.box.extent(d) * epsilon;
        region.err_per_dim[d] = e;
        if (e > region.err_max) {
            region.err_max = e;
            region.split_dim = d;
        }
    }
}

PiecewiseCV PiecewiseCV::build(const Integrand& g, std::size_t dim, BuildBudget budget,
                               double epsilon) {
    if (dim == 0) throw std::invalid_argument("build: dim must be >= 1");
    const std::size_t root_cost = pow3(dim);
    const std::size_t split_cost = 2 * pow3(dim - 1);
    if (budget.total_evals < root_cost)
        throw std::invalid_argument("build: budget below the 3^D root cost");

    PiecewiseCV cv;
    cv.dim_ = dim;

    // Leaves are append-only; a split marks its source dead and appends two
    // children, so heap entries stay valid until popped.
    struct Leaf {
        Region r;
        int parent_node = -1;  // -1: root
        int side = 0;          // 0 = left, 1 = right
        bool dead = false;
    };
    std::vector<Leaf> leaves;

    {
        Leaf root;
        root.r.box = Box::unit(dim);
        root.r.grid.dim = dim;
        root.r.grid.values.resize(root_cost);
        for (std::size_t i = 0; i < root_cost; ++i)
            root.r.grid.values[i] = checked_eval(g, TensorGrid::node(root.r.box, i));
        root.r.coeffs = fit_polynomial(root.r.grid);
        region_error(root.r, epsilon);
        leaves.push_back(std::move(root));
        cv.eval_count_ = root_cost;
    }

    struct HeapEntry {
        double err;
        double volume;
        std::size_t seq;  // leaf creation order; earlier wins ties
    };
    auto lower_priority = [](const HeapEntry& a, const HeapEntry& b) {
        if (a.err != b.err) return a.err < b.err;
        if (a.volume != b.volume) return a.volume < b.volume;
        return a.seq > b.seq;
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(lower_priority)> heap(
        lower_priority);
    heap.push({leaves[0].r.err_max, leaves[0].r.box.volume(), 0});

    while (cv.eval_count_ + split_cost <= budget.total_evals && !heap.empty()) {
        const HeapEntry top = heap.top();
        heap.pop();
        leaves[top.seq].dead = true;
        // Copy out before appending children: growth invalidates references.
        const Region parent_r = leaves[top.seq].r;
        const int parent_parent_node = leaves[top.seq].parent_node;
        const int parent_side = leaves[top.seq].side;
        leaves[top.seq].r.grid.values.clear();

        const std::size_t d = parent_r.split_dim;
        const double mid = 0.5 * (parent_r.box.lo[d] + parent_r.box.hi[d]);
        cv.split_log_.push_back(parent_r.box);

        const int node_index = static_cast<int>(cv.nodes_.size());
        KdNode node;
        node.split_dim = d;
        node.split_at = mid;
        cv.nodes_.push_back(node);
        if (parent_parent_node >= 0) {
            KdNode& pn = cv.nodes_[static_cast<std::size_t>(parent_parent_node)];
            (parent_side == 0 ? pn.left : pn.right) = node_index;
        }

        const std::size_t s = TensorGrid::stride(dim, d);
        const std::size_t n3 = root_cost;
        for (int side = 0; side < 2; ++side) {
            Leaf child;
            Box b = parent_r.box;
            (side == 0 ? b.hi[d] : b.lo[d]) = mid;
            child.r.box = std::move(b);
            child.r.grid.dim = dim;
            child.r.grid.values.resize(n3);
            // The child keeps two of the parent's node planes along the split
            // dimension and evaluates one new mid-plane of 3^(D-1) values.
            for (std::size_t flat = 0; flat < n3; ++flat) {
                const std::size_t digit = TensorGrid::digit(dim, flat, d);
                if (digit == 1) {
                    child.r.grid.values[flat] =
                        checked_eval(g, TensorGrid::node(child.r.box, flat));
                    ++cv.eval_count_;
                } else {
                    const std::size_t parent_digit = (digit / 2) + static_cast<std::size_t>(side);
                    child.r.grid.values[flat] = parent_r.grid.values[flat - digit * s + parent_digit * s];
                }
            }
            child.r.coeffs = fit_polynomial(child.r.grid);
            region_error(child.r, epsilon);
            child.parent_node = node_index;
            child.side = side;
            heap.push({child.r.err_max, child.r.box.volume(), leaves.size()});
            leaves.push_back(std::move(child));
        }
    }
    cv.leftover_evals_ = budget.total_evals - cv.eval_count_;

    // Compact live leaves into the region list and patch tree leaf slots.
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i].dead) continue;
        const int region_ref = -(static_cast<int>(cv.regions_.size()) + 1);
        if (leaves[i].parent_node >= 0) {
            KdNode& pn = cv.nodes_[static_cast<std::size_t>(leaves[i].parent_node)];
            (leaves[i].side == 0 ? pn.left : pn.right) = region_ref;
        }
        cv.regions_.push_back(std::move(leaves[i].r));
    }
    cv.rebuild_total();
    return cv;
}

PiecewiseCV PiecewiseCV::constant(std::size_t dim, double value) {
    PiecewiseCV cv;
    cv.dim_ = dim;
    Region r;
    r.box = Box::unit(dim);
    r.grid.dim = dim;
    r.grid.values.assign(pow3(dim), value);
    r.coeffs = fit_polynomial(r.grid);
    r.err_per_dim.assign(dim, 0.0);
    cv.regions_.push_back(std::move(r));
    cv.rebuild_total();
    return cv;
}

void PiecewiseCV::rebuild_total() {
    total_integral_ = 0.0;
    for (const Region& r : regions_)
        total_integral_ += integrate_poly(r.coeffs, r.box, r.box);
}

std::size_t PiecewiseCV::lookup(const Point& u) const {
    if (u.size() != dim_) throw std::invalid_argument("lookup: point dimension mismatch");
    for (std::size_t d = 0; d < dim_; ++d)
        if (u[d] < 0.0 || u[d] > 1.0)
            throw std::invalid_argument("lookup: point outside the unit cube");
    if (nodes_.empty()) {
        if (regions_.size() == 1) return 0;
        // Deserialized CVs carry no tree; scan with the same half-open rule.
        for (std::size_t r = 0; r < regions_.size(); ++r) {
            const Box& b = regions_[r].box;
            bool ok = true;
            for (std::size_t d = 0; d < dim_ && ok; ++d) {
                const bool closed_hi = b.hi[d] >= 1.0;
                ok = u[d] >= b.lo[d] && (closed_hi ? u[d] <= b.hi[d] : u[d] < b.hi[d]);
            }
            if (ok) return r;
        }
        throw std::logic_error("lookup: no owning region (partition violated)");
    }
    int cur = 0;
    for (;;) {
        const KdNode& n = nodes_[static_cast<std::size_t>(cur)];
        const int next = (u[n.split_dim] >= n.split_at) ? n.right : n.left;
        if (next < 0) return static_cast<std::size_t>(-next - 1);
        cur = next;
    }
}

double PiecewiseCV::value_at(const Point& u) const {
    const Region& r = regions_[lookup(u)];
    return eval_poly(r.coeffs, r.box, u);
}

double PiecewiseCV::bucket_integral(const Box& bucket) const {
    if (bucket.dim() > dim_)
        throw std::invalid_argument("bucket_integral: bucket has more dims than the CV");
    Box full = bucket;
    for (std::size_t d = bucket.dim(); d < dim_; ++d) {
        full.lo.push_back(0.0);
        full.hi.push_back(1.0);
    }
    double sum = 0.0;
    Box inter;
    for (const Region& r : regions_)
        if (r.box.intersect(full, inter)) sum += integrate_poly(r.coeffs, r.box, inter);
    return sum;
}

void PiecewiseCV::serialize(std::ostream& os) const {
    write_raw(os, kCacheMagic);
    write_raw(os, static_cast<std::uint32_t>(dim_));
    write_raw(os, static_cast<std::uint32_t>(regions_.size()));
    for (const Region& r : regions_) {
        for (std::size_t d = 0; d < dim_; ++d) write_raw(os, r.box.lo[d]);
        for (std::size_t d = 0; d < dim_; ++d) write_raw(os, r.box.hi[d]);
        for (double c : r.coeffs.c) write_raw(os, c);
    }
}

PiecewiseCV PiecewiseCV::deserialize(std::istream& is) {
    if (read_raw<std::uint64_t>(is) != kCacheMagic)
        throw std::runtime_error("CV cache: bad magic");
    PiecewiseCV cv;
    cv.dim_ = read_raw<std::uint32_t>(is);
    const std::uint32_t m = read_raw<std::uint32_t>(is);
    if (cv.dim_ == 0 || m == 0) throw std::runtime_error("CV cache: bad header");
    const std::size_t n3 = pow3(cv.dim_);
    for (std::uint32_t i = 0; i < m; ++i) {
        Region r;
        std::vector<double> lo(cv.dim_), hi(cv.dim_);
        for (double& v : lo) v = read_raw<double>(is);
        for (double& v : hi) v = read_raw<double>(is);
        r.box = Box(std::move(lo), std::move(hi));
        r.coeffs.dim = cv.dim_;
        r.coeffs.c.resize(n3);
        for (double& c : r.coeffs.c) c = read_raw<double>(is);
        r.grid.dim = cv.dim_;
        r.err_per_dim.assign(cv.dim_, 0.0);
        cv.regions_.push_back(std::move(r));
    }
    cv.rebuild_total();
    return cv;
}

}  // namespace pwcv
