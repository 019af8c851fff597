#include "blackwell/markov_chain.hpp"

#include <algorithm>

#include "blackwell/errors.hpp"

namespace blackwell {

namespace {

// Iterative Tarjan. Components come out in reverse topological order; we sort
// members for deterministic output.
struct TarjanState {
    const Eigen::MatrixXd& P;
    int n;
    std::vector<int> index, lowlink;
    std::vector<bool> on_stack;
    std::vector<int> stack;
    std::vector<std::vector<int>> components;
    int next_index = 0;

    explicit TarjanState(const Eigen::MatrixXd& matrix)
        : P(matrix),
          n(static_cast<int>(matrix.rows())),
          index(n, -1),
          lowlink(n, 0),
          on_stack(n, false) {}

    void run(int root) {
        // frame: (node, next successor to try)
        std::vector<std::pair<int, int>> frames{{root, 0}};
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            bool descended = false;
            for (int w = next; w < n; ++w) {
                if (P(v, w) <= 0.0) continue;
                frames.back().second = w + 1;
                if (index[w] < 0) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                std::vector<int> component;
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                    if (w == v) break;
                }
                std::sort(component.begin(), component.end());
                components.push_back(std::move(component));
            }
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().first;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }
};

}  // namespace

std::vector<std::vector<int>> strongly_connected_components(const Eigen::MatrixXd& P) {
    TarjanState tarjan(P);
    for (int v = 0; v < tarjan.n; ++v)
        if (tarjan.index[v] < 0) tarjan.run(v);
    std::sort(tarjan.components.begin(), tarjan.components.end());
    return tarjan.components;
}

ChainDecomposition decompose_chain(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    ChainDecomposition out;
    out.recurrent_class_of.assign(n, -1);
    for (auto& component : strongly_connected_components(P)) {
        bool closed = true;
        for (int i : component) {
            for (int j = 0; j < n && closed; ++j) {
                if (P(i, j) > 0.0 &&
                    !std::binary_search(component.begin(), component.end(), j))
                    closed = false;
            }
            if (!closed) break;
        }
        if (!closed) continue;
        const int id = static_cast<int>(out.recurrent_classes.size());
        for (int i : component) out.recurrent_class_of[i] = id;
        out.recurrent_classes.push_back(std::move(component));
    }
    return out;
}

Eigen::MatrixXd cesaro_limit(const Eigen::MatrixXd& P, const ChainDecomposition& d) {
    const int n = static_cast<int>(P.rows());
    const int num_classes = static_cast<int>(d.recurrent_classes.size());
    Eigen::MatrixXd limit = Eigen::MatrixXd::Zero(n, n);

    // Stationary distribution of each recurrent class.
    std::vector<Eigen::VectorXd> stationary(num_classes);
    for (int c = 0; c < num_classes; ++c) {
        const auto& members = d.recurrent_classes[c];
        const int m = static_cast<int>(members.size());
        Eigen::MatrixXd system(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                system(i, j) = P(members[j], members[i]) - (i == j ? 1.0 : 0.0);
        system.row(0).setOnes();  // replace one balance equation by normalization
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        rhs[0] = 1.0;
        Eigen::VectorXd mu = system.partialPivLu().solve(rhs);
        if (!mu.allFinite() || (system * mu - rhs).lpNorm<Eigen::Infinity>() > 1e-8)
            throw NumericalError("stationary distribution solve is numerically degenerate");
        stationary[c] = std::move(mu);
    }

    for (int c = 0; c < num_classes; ++c) {
        const auto& members = d.recurrent_classes[c];
        for (int i : members)
            for (std::size_t j = 0; j < members.size(); ++j)
                limit(i, members[j]) = stationary[c][static_cast<int>(j)];
    }

    // Absorption probabilities for transient states.
    std::vector<int> transient;
    for (int i = 0; i < n; ++i)
        if (d.recurrent_class_of[i] < 0) transient.push_back(i);
    if (!transient.empty()) {
        const int t = static_cast<int>(transient.size());
        Eigen::MatrixXd inner(t, t);
        Eigen::MatrixXd into_class = Eigen::MatrixXd::Zero(t, num_classes);
        for (int i = 0; i < t; ++i) {
            for (int j = 0; j < t; ++j)
                inner(i, j) = (i == j ? 1.0 : 0.0) - P(transient[i], transient[j]);
            for (int j = 0; j < n; ++j) {
                const int c = d.recurrent_class_of[j];
                if (c >= 0) into_class(i, c) += P(transient[i], j);
            }
        }
        Eigen::MatrixXd absorb = inner.partialPivLu().solve(into_class);
        if (!absorb.allFinite() ||
            (inner * absorb - into_class).lpNorm<Eigen::Infinity>() > 1e-8)
            throw NumericalError("transient absorption solve is numerically degenerate");
        for (int i = 0; i < t; ++i) {
            for (int c = 0; c < num_classes; ++c) {
                const auto& members = d.recurrent_classes[c];
                for (std::size_t j = 0; j < members.size(); ++j)
                    limit(transient[i], members[j]) +=
                        absorb(i, c) * stationary[c][static_cast<int>(j)];
            }
        }
    }
    return limit;
}

Eigen::MatrixXd cesaro_limit(const Eigen::MatrixXd& P) {
    return cesaro_limit(P, decompose_chain(P));
}

}  // namespace blackwell
