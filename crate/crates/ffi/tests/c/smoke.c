#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "quasicopy.h"

static const char *CONFIG =
    "{\"d\":2,\"phi\":0.6,\"n\":2,"
    "\"inner_measurement\":{\"family\":\"projective\"},"
    "\"rho0\":{\"family\":\"maximally_mixed\"},\"seed\":3}";

static int fail(const char *what, QcStatus st) {
    const char *msg = qc_last_error_message();
    fprintf(stderr, "%s: %s (%s)\n", what, qc_status_name((int32_t)st), msg ? msg : "no message");
    return 1;
}

int main(void) {
    QcConfig *cfg = NULL;
    QcStatus st = qc_config_from_json(CONFIG, &cfg);
    if (st != QC_STATUS_OK) return fail("config", st);

    size_t n = 0;
    if ((st = qc_config_outcomes(cfg, &n)) != QC_STATUS_OK) return fail("outcomes", st);

    double p[2];
    if ((st = qc_outcome_probabilities(cfg, p, 1)) != QC_STATUS_BUFFER_TOO_SMALL) return fail("short buffer", st);
    if ((st = qc_outcome_probabilities(cfg, p, n)) != QC_STATUS_OK) return fail("p_nu", st);
    if (fabs(p[0] + p[1] - 1.0) > 1e-12) return fail("p_nu sum", st);

    char *json = NULL;
    if ((st = qc_run_trial(cfg, 3, 0, QC_ENGINE_BOTH, &json)) != QC_STATUS_OK) return fail("trial", st);
    printf("%s\n", json);
    qc_string_free(json);

    QcMonteCarloSummary s;
    if ((st = qc_montecarlo(cfg, 3, 20000, QC_ENGINE_BLOCK, 0, &s)) != QC_STATUS_OK) return fail("montecarlo", st);
    printf("P[mu0] observed %.4f expected %.4f\n", s.p_mu0_observed, s.p_mu0_expected);

    qc_config_free(cfg);
    return 0;
}
