// Invariant smoke suite behind the `selftest` subcommand: one line per
// check, true iff everything passed. The full CTest suite is the real
// gate; this covers the load-bearing identities in seconds.

#pragma once

namespace scenerylab::selftest {

bool run_all(bool quick);

}  // namespace scenerylab::selftest
