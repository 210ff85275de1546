#include <stdio.h>
#include <string.h>

#include "twistee.h"

static const char *CONFIG =
    "[[experiment]]\n"
    "name = \"c\"\n"
    "[experiment.lattice]\n"
    "width = 8\n"
    "height = 8\n";

int main(void) {
    TwisteeState *state = NULL;
    if (twistee_state_from_toml(CONFIG, 0, &state) != TWISTEE_STATUS_OK) {
        fprintf(stderr, "build failed: %s\n", twistee_last_error_message());
        return 1;
    }
    size_t bits = 0;
    if (twistee_rect_entropy(state, 2, 2, 3, 3, &bits) != TWISTEE_STATUS_OK) {
        return 1;
    }
    printf("entropy %zu\n", bits);
    twistee_state_free(state);

    TwisteeState *bad = NULL;
    TwisteeStatus s = twistee_state_from_toml("not toml", 0, &bad);
    if (s == TWISTEE_STATUS_CONFIG && bad == NULL && strlen(twistee_last_error_message()) > 0) {
        printf("error config\n");
    }
    TwisteeFusionOutcome sigma = {1.0, 1.4142135623730951, 1.4142135623730951};
    double s_ann = 0.0;
    if (twistee_predict_s_ann(&sigma, 1, 2.0, &s_ann) != TWISTEE_STATUS_OK) {
        return 1;
    }
    printf("s_ann %.6f d %.6f\n", s_ann, twistee_extract_dimension(s_ann, 2.0));
    return 0;
}
