#include <stdio.h>
#include <string.h>
#include "ewl.h"

int main(void) {
    const char *pd = "{\"payoffs\": [[[3, 3], [0, 5]], [[5, 0], [1, 1]]]}";
    EwlGame *game = NULL;
    EwlExtendedGame *ext = NULL;
    char *json = NULL;
    double u1 = 0, u2 = 0;

    if (ewl_game_from_json(pd, true, &game) != EWL_STATUS_OK) return 1;
    if (ewl_extend_class(game, "C", "1/3 pi", &ext) != EWL_STATUS_OK) return 2;
    if (ewl_extended_size(ext) != 4) return 3;
    if (ewl_extended_payoff(ext, 3, 3, &u1, &u2) != EWL_STATUS_OK) return 4;
    if (u1 != 43.0 / 16.0 || u2 != 43.0 / 16.0) return 5;
    if (ewl_equilibria_json(ext, &json) != EWL_STATUS_OK) return 6;
    if (strstr(json, "23/12") == NULL) return 7;
    ewl_string_free(json);
    if (ewl_extend_class(game, "C", NULL, &ext) != EWL_STATUS_INVALID_CLASS_PARAMS) return 8;
    if (strlen(ewl_last_error_message()) == 0) return 9;
    ewl_extended_free(ext);
    ewl_game_free(game);
    printf("ok %s\n", ewl_version());
    return 0;
}
