// opcount.hpp - Real-multiplication counters per receiver stage

#pragma once

#include <cstdint>

namespace otfs {

struct OpCounts {
    uint64_t estimation = 0;
    uint64_t pilot_cancel = 0;
    uint64_t mp_detect = 0;
    uint64_t ldpc_decode = 0;
    uint64_t llr_to_logits = 0;
    uint64_t logits_to_pmf = 0;
    uint64_t replica = 0;
    uint64_t data_cancel = 0;

    uint64_t total() const {
        return estimation + pilot_cancel + mp_detect + ldpc_decode + llr_to_logits +
               logits_to_pmf + replica + data_cancel;
    }

    OpCounts& operator+=(const OpCounts& o) {
        estimation += o.estimation;
        pilot_cancel += o.pilot_cancel;
        mp_detect += o.mp_detect;
        ldpc_decode += o.ldpc_decode;
        llr_to_logits += o.llr_to_logits;
        logits_to_pmf += o.logits_to_pmf;
        replica += o.replica;
        data_cancel += o.data_cancel;
        return *this;
    }
};

}  // namespace otfs
