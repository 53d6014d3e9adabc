#include <stdio.h>
#include <string.h>
#include "aitax.h"

int main(void) {
    AitaxConfig *cfg = NULL;
    AitaxSolution *sol = NULL;
    AitaxSummary s;
    if (aitax_config_desk(AITAX_DESK_COGNITIVE_BINDING, &cfg) != AITAX_STATUS_OK) return 10;
    if (aitax_solve(cfg, &sol) != AITAX_STATUS_OK) return 11;
    if (aitax_solution_summary(sol, &s) != AITAX_STATUS_OK) return 12;
    if (s.regime != AITAX_REGIME_COGNITIVE_BINDS) return 13;
    if (!(s.tau_k > 0.0 && s.tau_ai < 0.0)) return 14;
    if (aitax_config_set(cfg, "beta", 0.5) != AITAX_STATUS_INVALID_ARGUMENT) return 15;
    if (strlen(aitax_last_error()) == 0) return 16;
    printf("%s %.6e %.6e\n", aitax_version(), s.tau_k, s.tau_ai);
    aitax_solution_free(sol);
    aitax_config_free(cfg);
    return 0;
}
