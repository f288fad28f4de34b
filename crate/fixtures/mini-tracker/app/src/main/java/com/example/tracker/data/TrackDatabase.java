package com.example.tracker.data;

import android.content.Context;
import android.database.Cursor;
import android.database.sqlite.SQLiteDatabase;
import android.database.sqlite.SQLiteOpenHelper;

public class TrackDatabase extends SQLiteOpenHelper {
    public TrackDatabase(Context context) {
        super(context, "tracks.db", null, 2);
    }

    @Override
    public void onCreate(SQLiteDatabase db) {
        db.execSQL("CREATE TABLE tracks (id INTEGER PRIMARY KEY, name TEXT, meters INTEGER, started INTEGER)");
    }

    @Override
    public void onUpgrade(SQLiteDatabase db, int oldVersion, int newVersion) {
        db.execSQL("DROP TABLE IF EXISTS tracks");
        onCreate(db);
    }

    public void begin(long startedAt) {
        getWritableDatabase().execSQL("INSERT INTO tracks (name, meters, started) VALUES ('run', 0, " + startedAt + ")");
    }

    public Cursor recent(int limit) {
        return getReadableDatabase().rawQuery(
                "SELECT id, name, meters FROM tracks ORDER BY started DESC LIMIT " + limit, null);
    }

    public void rename(long id, String name) {
        getWritableDatabase().execSQL("UPDATE tracks SET name = ? WHERE id = ?", new Object[] {name, id});
    }

    public String exportCsv() {
        StringBuilder out = new StringBuilder();
        Cursor all = getReadableDatabase().rawQuery("select name, meters from tracks", null);
        while (all.moveToNext()) {
            out.append(all.getString(0)).append(',').append(all.getInt(1)).append('\n');
        }
        all.close();
        return out.toString();
    }
}
