#include "chairsearch/index.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/hash.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace chairsearch {

void DescriptorTable::append(ChairId id, std::span<const float> row) {
    if (row.size() != dims_)
        throw Error(ErrorCode::DimensionMismatch,
                    "row dimension " + std::to_string(row.size()) + " != " + std::to_string(dims_));
    ids_.push_back(id);
    values_.insert(values_.end(), row.begin(), row.end());
}

std::uint64_t DescriptorTable::digest() const noexcept {
    Fnv1a h;
    h.update_span(std::span<const ChairId>(ids_));
    h.update_span(std::span<const float>(values_));
    return h.digest();
}

double squared_distance(std::span<const float> a, std::span<const float> b) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum;
}

namespace {

// Same summation order as squared_distance, but gives up once the partial sum
// exceeds `bound`. Terms are non-negative, so the partial sum never decreases
// and an abandoned row could not have beaten the bound.
double bounded_squared_distance(std::span<const float> a, std::span<const float> b, double bound) noexcept {
    double sum = 0.0;
    std::size_t i = 0;
    constexpr std::size_t kBlock = 16;
    while (i < a.size()) {
        const std::size_t end = std::min(a.size(), i + kBlock);
        for (; i < end; ++i) {
            const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
            sum += d * d;
        }
        if (sum > bound) return sum;
    }
    return sum;
}

struct Candidate {
    double d2;
    ChairId id;

    friend bool operator<(const Candidate& a, const Candidate& b) noexcept {
        return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
    }
};

void check_query(const DescriptorTable& table, std::span<const float> query) {
    if (table.empty()) throw Error(ErrorCode::EmptyIndex, "index is empty");
    if (query.size() != table.dims())
        throw Error(ErrorCode::DimensionMismatch,
                    "query dimension " + std::to_string(query.size()) + " != " + std::to_string(table.dims()));
}

ResultSet finish(std::vector<Candidate>& candidates, std::size_t k) {
    std::sort(candidates.begin(), candidates.end());
    ResultSet out;
    for (std::size_t i = 0; i < std::min(k, candidates.size()); ++i)
        out.push_back({candidates[i].id, std::sqrt(candidates[i].d2)});
    return out;
}

} // namespace

ResultSet knn_scan(const DescriptorTable& table, std::span<const float> query, std::size_t k) {
    check_query(table, query);
    if (k == 0) return {};
    const auto rows = static_cast<std::int64_t>(table.size());
    std::vector<std::vector<Candidate>> local(static_cast<std::size_t>(omp_get_max_threads()));

#pragma omp parallel
    {
        // Max-heap of the k best seen by this thread; top() is the worst of them.
        std::priority_queue<Candidate> best;
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < rows; ++r) {
            const auto row = table.row(static_cast<std::size_t>(r));
            const double bound = best.size() < k ? HUGE_VAL : best.top().d2;
            const Candidate c{bounded_squared_distance(row, query, bound), table.id(static_cast<std::size_t>(r))};
            if (best.size() < k) {
                best.push(c);
            } else if (c < best.top()) {
                best.pop();
                best.push(c);
            }
        }
        auto& mine = local[static_cast<std::size_t>(omp_get_thread_num())];
        while (!best.empty()) {
            mine.push_back(best.top());
            best.pop();
        }
    }

    std::vector<Candidate> merged;
    for (auto& l : local) merged.insert(merged.end(), l.begin(), l.end());
    return finish(merged, k);
}

ResultSet knn_scan_serial(const DescriptorTable& table, std::span<const float> query, std::size_t k) {
    check_query(table, query);
    std::vector<Candidate> all;
    all.reserve(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) all.push_back({squared_distance(table.row(r), query), table.id(r)});
    return finish(all, k);
}

RetrievalIndex RetrievalIndex::build(const DatasetManifest& manifest) {
    const auto& shapes = manifest.shapes();
    std::vector<ShapeViewCounts> counts(shapes.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(shapes.size()); ++s)
        counts[static_cast<std::size_t>(s)] = shape_view_counts(shapes[static_cast<std::size_t>(s)]);

    std::unordered_map<int, std::size_t> shape_slot;
    for (std::size_t i = 0; i < shapes.size(); ++i) shape_slot[shapes[i].shape_id] = i;

    const auto& instances = manifest.instances();
    std::vector<FeatureVector> visual(instances.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(instances.size()); ++i) {
        const auto& inst = instances[static_cast<std::size_t>(i)];
        visual[static_cast<std::size_t>(i)] = descriptor_from_counts(counts[shape_slot.at(inst.shape_id)], inst.assignment);
    }

    RetrievalIndex index;
    index.semantic_.reserve(instances.size());
    index.visual_.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        index.semantic_.append(instances[i].chair_id, semantic_vector(instances[i], manifest).flatten());
        index.visual_.append(instances[i].chair_id, visual[i]);
    }
    return index;
}

RetrievalIndex RetrievalIndex::build_serial(const DatasetManifest& manifest) {
    RetrievalIndex index;
    for (const auto& inst : manifest.instances()) {
        const ChairShape& shape = manifest.shape(inst.shape_id);
        index.semantic_.append(inst.chair_id, semantic_vector(shape, inst.assignment).flatten());
        const Scene scene{nullptr, ModelRef{&shape, inst.assignment}};
        index.visual_.append(inst.chair_id, visual_descriptor_serial(scene));
    }
    return index;
}

} // namespace chairsearch
