#include "causal/mb.hpp"

#include <chrono>
#include <cctype>
#include <string>
#include <vector>

#include "mb_engine.hpp"

namespace causal {

namespace {

using detail::MbEngine;
using detail::PcMb;

// --- registry ------------------------------------------------------------

struct AlgorithmEntry {
    MbAlgorithm algorithm;
    const char* name;
    bool grow_shrink;
};

constexpr AlgorithmEntry kRegistry[] = {
    {MbAlgorithm::Gs, "GS", true},
    {MbAlgorithm::Iamb, "IAMB", true},
    {MbAlgorithm::InterIamb, "interIAMB", true},
    {MbAlgorithm::IambNpc, "IAMBnPC", true},
    {MbAlgorithm::InterIambNpc, "interIAMBnPC", true},
    {MbAlgorithm::FastIamb, "Fast-IAMB", true},
    {MbAlgorithm::Fbed, "FBED", true},
    {MbAlgorithm::Mmmb, "MMMB", false},
    {MbAlgorithm::HitonMb, "HITON-MB", false},
    {MbAlgorithm::Pcmb, "PCMB", false},
    {MbAlgorithm::Ipcmb, "IPCMB", false},
    {MbAlgorithm::Mbor, "MBOR", false},
    {MbAlgorithm::Stmb, "STMB", false},
    {MbAlgorithm::Bamb, "BAMB", false},
    {MbAlgorithm::Eemb, "EEMB", false},
};

std::string fold_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (c == '-' || c == '_') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

void check_target(const CiSource& ci, int target) {
    if (target < 0 || target >= ci.n_vars())
        throw Error(ErrorKind::UnknownNode, "learn_mb: target index " + std::to_string(target) +
                                                " out of range for " +
                                                std::to_string(ci.n_vars()) + " variables");
}

} // namespace

const std::vector<MbAlgorithm>& all_mb_algorithms() {
    static const std::vector<MbAlgorithm> all = [] {
        std::vector<MbAlgorithm> v;
        for (const auto& entry : kRegistry) v.push_back(entry.algorithm);
        return v;
    }();
    return all;
}

std::string mb_algorithm_name(MbAlgorithm a) {
    for (const auto& entry : kRegistry)
        if (entry.algorithm == a) return entry.name;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown markov-blanket algorithm id");
}

MbAlgorithm parse_mb_algorithm(const std::string& name) {
    const std::string folded = fold_name(name);
    for (const auto& entry : kRegistry)
        if (folded == fold_name(entry.name)) return entry.algorithm;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown markov-blanket algorithm: " + name);
}

bool is_grow_shrink(MbAlgorithm a) {
    for (const auto& entry : kRegistry)
        if (entry.algorithm == a) return entry.grow_shrink;
    throw Error(ErrorKind::UnknownAlgorithm, "unknown markov-blanket algorithm id");
}

MbResult grow_shrink_mb(CiSource& ci, int target, MbAlgorithm variant, const MbOptions& options) {
    if (!is_grow_shrink(variant))
        throw Error(ErrorKind::UnknownAlgorithm,
                    mb_algorithm_name(variant) + " is not a grow-shrink variant");
    check_target(ci, target);
    const auto t0 = std::chrono::steady_clock::now();
    const long long before = ci.counter().total_tests;

    MbEngine e(ci);
    NodeSet mb;
    switch (variant) {
        case MbAlgorithm::Gs: mb = detail::gs_blanket(e, target); break;
        case MbAlgorithm::Iamb: mb = detail::iamb_blanket(e, target); break;
        case MbAlgorithm::InterIamb: mb = detail::inter_iamb_blanket(e, target); break;
        case MbAlgorithm::IambNpc: mb = detail::iamb_npc_blanket(e, target); break;
        case MbAlgorithm::InterIambNpc: mb = detail::inter_iamb_npc_blanket(e, target); break;
        case MbAlgorithm::FastIamb: mb = detail::fast_iamb_blanket(e, target); break;
        case MbAlgorithm::Fbed: mb = detail::fbed_blanket(e, target, options.fbed_k); break;
        default: break;  // unreachable; family checked above
    }

    MbResult out;
    out.target = target;
    out.mb = mb;
    out.algorithm = mb_algorithm_name(variant);
    out.n_ci_tests = ci.counter().total_tests - before;
    out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

MbResult topology_mb(CiSource& ci, int target, MbAlgorithm variant) {
    if (is_grow_shrink(variant))
        throw Error(ErrorKind::UnknownAlgorithm,
                    mb_algorithm_name(variant) + " is not a topology variant");
    check_target(ci, target);
    const auto t0 = std::chrono::steady_clock::now();
    const long long before = ci.counter().total_tests;

    MbEngine e(ci);
    PcMb r;
    switch (variant) {
        case MbAlgorithm::Mmmb: r = detail::mmmb_run(e, target); break;
        case MbAlgorithm::HitonMb: r = detail::hiton_mb_run(e, target); break;
        case MbAlgorithm::Pcmb: r = detail::pcmb_run(e, target); break;
        case MbAlgorithm::Ipcmb: r = detail::ipcmb_run(e, target); break;
        case MbAlgorithm::Mbor: r = detail::mbor_run(e, target); break;
        case MbAlgorithm::Stmb: r = detail::stmb_run(e, target); break;
        case MbAlgorithm::Bamb: r = detail::bamb_run(e, target); break;
        case MbAlgorithm::Eemb: r = detail::eemb_run(e, target); break;
        default: break;  // unreachable; family checked above
    }

    MbResult out;
    out.target = target;
    out.mb = r.mb;
    out.pc = r.pc;
    out.algorithm = mb_algorithm_name(variant);
    out.n_ci_tests = ci.counter().total_tests - before;
    out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

MbResult learn_mb(CiSource& ci, int target, MbAlgorithm algorithm, const MbOptions& options) {
    return is_grow_shrink(algorithm) ? grow_shrink_mb(ci, target, algorithm, options)
                                     : topology_mb(ci, target, algorithm);
}

MbResult learn_mb(CiSource& ci, int target, const std::string& algorithm,
                  const MbOptions& options) {
    return learn_mb(ci, target, parse_mb_algorithm(algorithm), options);
}

NodeSet find_spouses(CiSource& ci, int target, const NodeSet& pc) {
    check_target(ci, target);
    for (int v : pc)
        if (v < 0 || v >= ci.n_vars())
            throw Error(ErrorKind::UnknownNode,
                        "find_spouses: pc index " + std::to_string(v) + " out of range");
    if (set_contains(pc, target))
        throw Error(ErrorKind::Precondition, "find_spouses: target cannot be in its own pc set");
    MbEngine e(ci);
    return e.spouses_via_pc(target, pc, MbEngine::Flavor::Sweep);
}

} // namespace causal
