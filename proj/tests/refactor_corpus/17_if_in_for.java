// inputs: items, i, key, found
// outputs: found
// expect: ok
class Search {
    int find(Items items, int key) {
        int found = -1;
        for (int i = 0; i < items.size(); i++) {
            /*<*/if (items.get(i) == key) {
                found = i;
            }/*>*/
        }
        return found;
    }
}
