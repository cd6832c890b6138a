#include <stdio.h>
#include <stdlib.h>
#include "tfqm.h"

int main(void) {
    const char *json =
        "{\"schema\":1,\"family\":\"heisenberg\",\"n\":2,"
        "\"delta_omega\":1.0,\"eta\":0.99}";
    struct TfqmState *state = NULL;
    if (tfqm_state_from_json(json, &state) != TFQM_OK) {
        fprintf(stderr, "parse: %s\n", tfqm_last_error_message());
        return 1;
    }
    double variance = 0.0, qfi = 0.0, crb = 0.0;
    if (tfqm_qfi(state, 1, &variance, &qfi, &crb) != TFQM_OK) {
        fprintf(stderr, "qfi: %s\n", tfqm_last_error_message());
        return 1;
    }
    printf("variance=%.12f qfi=%.12f crb=%.12f\n", variance, qfi, crb);

    uint64_t n[4] = {1, 2, 4, 8};
    double v[4];
    double transition = 0.0;
    if (tfqm_scaling_sweep(0.99, 1.0, n, 4, v, &transition) != TFQM_OK) {
        fprintf(stderr, "sweep: %s\n", tfqm_last_error_message());
        return 1;
    }
    printf("transition=%.6f v8=%.9f version=%s\n", transition, v[3], tfqm_version());
    tfqm_state_free(state);
    return 0;
}
