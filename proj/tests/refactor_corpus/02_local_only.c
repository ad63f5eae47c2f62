// inputs: x
// outputs:
// expect: ok
void f(int x) {
    /*<*/if (x) {
        int y = 1;
        y++;
    }/*>*/
}
