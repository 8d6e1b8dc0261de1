#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace smca::detail {

// Iterative Tarjan over an adjacency callback. Visits only the given
// vertices; the callback must yield successors within that vertex set.
// Returns component ids in reverse topological order (a component's id is
// larger than the ids of components it can reach), -1 for unvisited vertices.
struct SccResult {
    std::vector<std::int32_t> component;   // indexed by vertex id
    std::int32_t n_components = 0;
};

template <typename Successors>
SccResult tarjan_scc(std::uint32_t n_vertices, std::span<const std::uint32_t> vertices,
                     Successors&& successors) {
    SccResult res;
    res.component.assign(n_vertices, -1);
    std::vector<std::int32_t> index(n_vertices, -1), lowlink(n_vertices, 0);
    std::vector<std::uint8_t> on_stack(n_vertices, 0);
    std::vector<std::uint32_t> stack;
    std::int32_t next_index = 0;

    struct Frame {
        std::uint32_t v;
        std::uint32_t succ_begin;  // this frame's range in succ_storage
        std::uint32_t succ_pos;
        std::uint32_t succ_end;
    };
    std::vector<Frame> call;
    std::vector<std::uint32_t> succ_storage;  // successor ranges, stacked with the frames

    auto push_vertex = [&](std::uint32_t v) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
        const auto begin = static_cast<std::uint32_t>(succ_storage.size());
        successors(v, succ_storage);
        call.push_back({v, begin, begin, static_cast<std::uint32_t>(succ_storage.size())});
    };

    for (std::uint32_t root : vertices) {
        if (index[root] != -1) continue;
        push_vertex(root);
        while (!call.empty()) {
            Frame& fr = call.back();
            const std::uint32_t v = fr.v;
            if (fr.succ_pos < fr.succ_end) {
                const std::uint32_t w = succ_storage[fr.succ_pos++];
                if (index[w] == -1) {
                    push_vertex(w);
                } else if (on_stack[w] && index[w] < lowlink[v]) {
                    lowlink[v] = index[w];
                }
                continue;
            }
            succ_storage.resize(fr.succ_begin);
            call.pop_back();
            if (!call.empty()) {
                const std::uint32_t parent = call.back().v;
                if (lowlink[v] < lowlink[parent]) lowlink[parent] = lowlink[v];
            }
            if (lowlink[v] == index[v]) {
                while (true) {
                    const std::uint32_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    res.component[w] = res.n_components;
                    if (w == v) break;
                }
                ++res.n_components;
            }
        }
    }
    return res;
}

} // namespace smca::detail
