#include "otfs/frame.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace otfs {

int max_feasible_pilots(int N, int M, int l_max, int k_max) {
    return (M / (l_max + 1)) * (N / (2 * k_max + 1));
}

std::vector<std::pair<int, int>> place_pilots(const SchemeId& scheme, int N, int M,
                                              int l_max, int k_max) {
    const int n_pilots = scheme.kind == SchemeKind::EP ? 1 : scheme.n_pilots;
    if (n_pilots == 1) return {{M / 2, N / 2}};

    int max_p = max_feasible_pilots(N, M, l_max, k_max);
    if (n_pilots > max_p)
        throw ConfigError("cannot place " + std::to_string(n_pilots) +
                          " pilots on a " + std::to_string(M) + "x" + std::to_string(N) +
                          " grid with spread (" + std::to_string(l_max) + "," +
                          std::to_string(k_max) + "): max feasible = " + std::to_string(max_p));

    // Row-major lattice; the Doppler offset k_max centers each pilot's
    // +-k_max image span inside its lattice cell.
    std::vector<std::pair<int, int>> pos;
    const int dm = l_max + 1;
    const int dn = 2 * k_max + 1;
    const int lattice_rows = M / dm;
    const int lattice_cols = N / dn;
    for (int i = 0; i < lattice_rows && static_cast<int>(pos.size()) < n_pilots; ++i)
        for (int j = 0; j < lattice_cols && static_cast<int>(pos.size()) < n_pilots; ++j)
            pos.emplace_back(i * dm, k_max + j * dn);
    return pos;
}

int data_capacity(const SchemeId& scheme, int N, int M, int l_max, int k_max) {
    if (scheme.kind == SchemeKind::EP)
        return N * M - (2 * l_max + 1) * (4 * k_max + 1);
    return N * M;
}

DDFrame build_frame(const SchemeId& scheme, const PowerAllocation& alloc,
                    const CVec& data_symbols, int N, int M, int l_max, int k_max) {
    const int cap = data_capacity(scheme, N, M, l_max, k_max);
    if (static_cast<int>(data_symbols.size()) != cap)
        throw ConfigError("frame expects " + std::to_string(cap) + " data symbols, got " +
                          std::to_string(data_symbols.size()));

    DDFrame f;
    f.grid = Grid(M, N);
    f.pilot_mask.assign(static_cast<size_t>(M) * N, 0);
    f.guard_mask.assign(static_cast<size_t>(M) * N, 0);
    f.scheme = scheme;
    f.pilot_positions = place_pilots(scheme, N, M, l_max, k_max);
    f.x_p = Complex(std::sqrt(alloc.sigma_p2), 0.0);

    for (auto [mp, np] : f.pilot_positions) f.pilot_mask[vec_index(mp, np, M)] = 1;

    if (scheme.kind == SchemeKind::EP) {
        auto [mp, np] = f.pilot_positions.front();
        for (int dm = -l_max; dm <= l_max; ++dm) {
            for (int dn = -2 * k_max; dn <= 2 * k_max; ++dn) {
                if (dm == 0 && dn == 0) continue;
                f.guard_mask[vec_index(mod_floor(mp + dm, M), mod_floor(np + dn, N), M)] = 1;
            }
        }
    }

    size_t next = 0;
    for (int i = 0; i < N * M; ++i) {
        if (f.guard_mask[i]) continue;
        if (scheme.kind == SchemeKind::EP && f.pilot_mask[i]) continue;
        f.grid.v[i] = data_symbols[next++];
        f.data_positions.push_back(i);
    }
    for (auto [mp, np] : f.pilot_positions) f.grid(mp, np) += f.x_p;

    return f;
}

CVec pilot_vector(const DDFrame& frame) {
    CVec xp(frame.grid.size(), Complex(0.0, 0.0));
    for (auto [mp, np] : frame.pilot_positions) xp[vec_index(mp, np, frame.M())] = frame.x_p;
    return xp;
}

double expected_frame_energy(const DDFrame& frame, const PowerAllocation& alloc) {
    return static_cast<double>(frame.pilot_positions.size()) * std::norm(frame.x_p) +
           static_cast<double>(frame.data_positions.size()) * alloc.sigma_d2;
}

void dump_frame(const DDFrame& frame, const std::string& path_prefix) {
    // Row-major complex64 pairs.
    std::ofstream bin(path_prefix + ".cf64", std::ios::binary);
    for (int m = 0; m < frame.M(); ++m) {
        for (int n = 0; n < frame.N(); ++n) {
            float re = static_cast<float>(frame.grid(m, n).real());
            float im = static_cast<float>(frame.grid(m, n).imag());
            bin.write(reinterpret_cast<const char*>(&re), sizeof(re));
            bin.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }

    nlohmann::json j;
    j["scheme"] = frame.scheme.label();
    j["M"] = frame.M();
    j["N"] = frame.N();
    j["x_p"] = {frame.x_p.real(), frame.x_p.imag()};
    for (auto [mp, np] : frame.pilot_positions) j["pilot_positions"].push_back({mp, np});
    j["pilot_mask"] = frame.pilot_mask;
    j["guard_mask"] = frame.guard_mask;
    j["data_positions"] = frame.data_positions;
    std::ofstream(path_prefix + ".json") << j.dump(2) << "\n";
}

}  // namespace otfs
