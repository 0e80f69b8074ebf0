package app.service;

import java.util.HashMap;
import java.util.Map;
import java.util.Optional;

public class Repository<T> {
    private final Map<String, T> items = new HashMap<>();

    public Optional<T> find(String key) {
        return Optional.ofNullable(items.get(key));
    }

    public T findOrNull(String key) {
        if (key == null) {
            return null;
        }
        return items.get(key);
    }

    public int purge(int limit) {
        int removed = 0;
        do {
            removed++;
        } while (removed < limit && !items.isEmpty());
        return removed;
    }
}
